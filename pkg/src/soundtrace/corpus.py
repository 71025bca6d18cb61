"""Time-binned corpus data model and ingestion.

Tokens are plain strings over a declared alphabet. Bins hold multisets of
tokens (duplicates kept), so frequent words weigh more in downstream counts.
All types are immutable after construction.
"""

from __future__ import annotations

import json
import os
import string
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_VOWELS = "aeiouyæøå"


class CorpusError(Exception):
    """Malformed corpora, alphabets or input files."""


class Condition(Enum):
    TARGET = "target"
    CONTROL = "control"


@dataclass(frozen=True)
class Alphabet:
    """Ordered character inventory plus named character classes (e.g. V)."""

    symbols: tuple[str, ...]
    boundary: str = "#"
    classes: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise CorpusError("alphabet needs at least one symbol")
        if any(len(s) != 1 for s in symbols):
            raise CorpusError("alphabet symbols must be single characters")
        if len(set(symbols)) != len(symbols):
            raise CorpusError("alphabet symbols must be distinct")
        if len(self.boundary) != 1:
            raise CorpusError("boundary must be a single character")
        if self.boundary in symbols:
            raise CorpusError(f"boundary {self.boundary!r} may not be an alphabet symbol")
        symbol_set = frozenset(symbols)
        classes = {}
        for name, members in dict(self.classes).items():
            members = frozenset(members)
            unknown = members - symbol_set
            if unknown:
                raise CorpusError(f"class {name!r} contains non-alphabet characters: {sorted(unknown)}")
            classes[name] = members
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_symbol_set", symbol_set)

    def __contains__(self, ch: str) -> bool:
        return ch in self._symbol_set

    @classmethod
    def from_tokens(cls, tokens: Iterable[str], vowels: str = DEFAULT_VOWELS,
                    boundary: str = "#") -> "Alphabet":
        """Infer the alphabet from observed tokens, splitting V/C by `vowels`."""
        chars = sorted({c for t in tokens for c in t})
        if not chars:
            raise CorpusError("cannot infer an alphabet from empty input")
        classes = {}
        if vowels:
            v = frozenset(vowels) & set(chars)
            classes = {"V": v, "C": frozenset(chars) - v}
        return cls(tuple(chars), boundary, classes)

    def to_dict(self) -> dict:
        return {
            "symbols": "".join(self.symbols),
            "boundary": self.boundary,
            "classes": {k: "".join(sorted(v)) for k, v in self.classes.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Alphabet":
        return cls(tuple(d["symbols"]), d.get("boundary", "#"),
                   {k: frozenset(v) for k, v in d.get("classes", {}).items()})


@dataclass(frozen=True)
class TimeBin:
    index: int
    label: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.index < 1:
            raise CorpusError(f"bin index must be >= 1, got {self.index}")
        if any(not t for t in self.tokens):
            raise CorpusError(f"bin {self.index} contains an empty token")


@dataclass(frozen=True)
class TimeBinnedCorpus:
    alphabet: Alphabet
    bins: tuple[TimeBin, ...]
    condition: Condition = Condition.TARGET

    def __post_init__(self):
        bins = tuple(self.bins)
        object.__setattr__(self, "bins", bins)
        if len(bins) < 2:
            raise CorpusError("a corpus needs at least 2 bins")
        for i, b in enumerate(bins, 1):
            if b.index != i:
                raise CorpusError(f"bin indices must be consecutive from 1; position {i} has index {b.index}")
        seen = set("".join(t for b in bins for t in b.tokens))
        bad = seen - set(self.alphabet.symbols)
        if bad:
            raise CorpusError(f"tokens contain characters outside the alphabet: {sorted(bad)}")

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    def with_condition(self, condition: Condition) -> "TimeBinnedCorpus":
        return TimeBinnedCorpus(self.alphabet, self.bins, condition)


@dataclass(frozen=True)
class Attestation:
    form: str
    year: int


@dataclass(frozen=True)
class TokenizationPolicy:
    lowercase: bool = True
    strip_chars: str = string.punctuation + string.digits + "«»„“”‘’–—"
    alphabet: Alphabet | None = None


DEFAULT_POLICY = TokenizationPolicy()


def tokenize_with_report(raw_text: str, policy: TokenizationPolicy = DEFAULT_POLICY):
    """Whitespace-split and normalize; returns (tokens, n_dropped).

    Words with characters outside the declared alphabet are dropped and
    counted, never silently mutated. Words emptied by stripping are removed
    without counting as drops.
    """
    table = str.maketrans("", "", policy.strip_chars)
    tokens, dropped = [], 0
    for word in raw_text.split():
        if policy.lowercase:
            word = word.casefold()
        word = word.translate(table)
        if not word:
            continue
        if policy.alphabet is not None and any(c not in policy.alphabet for c in word):
            dropped += 1
            continue
        tokens.append(word)
    return tokens, dropped


def tokenize(raw_text: str, policy: TokenizationPolicy = DEFAULT_POLICY) -> list[str]:
    return tokenize_with_report(raw_text, policy)[0]


def bin_attestations(attestations: Sequence[Attestation], start_year: int,
                     bin_width_years: int, n_bins: int, *,
                     alphabet: Alphabet | None = None,
                     fold_early: bool = True,
                     condition: Condition = Condition.TARGET):
    """Assign dated forms to consecutive time bins.

    Year y lands in bin floor((y - start_year) / bin_width_years) + 1.
    Years before the range fold into bin 1 (the pre-change reference period)
    unless fold_early is False, in which case they are dropped. Years past
    the last bin are always dropped. Returns (corpus, n_dropped).
    """
    if bin_width_years <= 0:
        raise CorpusError("bin_width_years must be positive")
    if n_bins < 2:
        raise CorpusError("need at least 2 bins")
    if not attestations:
        raise CorpusError("no attestations to bin")
    per_bin: list[list[str]] = [[] for _ in range(n_bins)]
    dropped = 0
    for att in attestations:
        idx = (att.year - start_year) // bin_width_years + 1
        if idx < 1:
            if fold_early:
                idx = 1
            else:
                dropped += 1
                continue
        if idx > n_bins:
            dropped += 1
            continue
        per_bin[idx - 1].append(att.form)
    if all(not toks for toks in per_bin):
        raise CorpusError("every bin would be empty")
    if alphabet is None:
        alphabet = Alphabet.from_tokens(t for toks in per_bin for t in toks)
    bins = []
    for i, toks in enumerate(per_bin):
        lo = start_year + i * bin_width_years
        label = f"{lo}-{lo + bin_width_years - 1}"
        bins.append(TimeBin(i + 1, label, tuple(toks)))
    return TimeBinnedCorpus(alphabet, tuple(bins), condition), dropped


def make_shuffle_control(corpus: TimeBinnedCorpus, seed: int) -> TimeBinnedCorpus:
    """Redistribute pooled tokens uniformly at random, keeping per-bin sizes.

    Whole tokens are moved (never characters), so word-internal co-occurrence
    is preserved while temporal ordering is destroyed. Deterministic per seed.
    """
    pooled = [t for b in corpus.bins for t in b.tokens]
    perm = np.random.default_rng(seed).permutation(len(pooled))
    shuffled = [pooled[i] for i in perm]
    out, pos = [], 0
    for b in corpus.bins:
        k = len(b.tokens)
        out.append(TimeBin(b.index, b.label, tuple(shuffled[pos:pos + k])))
        pos += k
    return TimeBinnedCorpus(corpus.alphabet, tuple(out), Condition.CONTROL)


def load_attestation_table(path, *, lowercase: bool = True):
    """Read a `year<TAB>form` TSV; returns (attestations, warnings).

    Lines starting with '#' and blank lines are ignored; malformed lines are
    skipped and reported with their line number.
    """
    path = Path(path)
    attestations, warnings = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                warnings.append(f"line {lineno}: expected year<TAB>form, got {line!r}")
                continue
            year_s, form = parts
            try:
                year = int(year_s.strip())
            except ValueError:
                warnings.append(f"line {lineno}: unparseable year {year_s!r}")
                continue
            form = form.strip()
            if lowercase:
                form = form.casefold()
            if not form:
                warnings.append(f"line {lineno}: empty form")
                continue
            attestations.append(Attestation(form, year))
    if not attestations:
        raise CorpusError(f"no valid records in {path}")
    return attestations, warnings


def _write_text(path: Path, text: str) -> None:
    # write-then-rename so readers never see a partial file
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save_plain_corpus(corpus: TimeBinnedCorpus, directory) -> Path:
    """Write one-token-per-line bin files plus a `bin_index<TAB>path` manifest.

    Also drops an alphabet.json sidecar next to the manifest. Returns the
    manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for b in corpus.bins:
        name = f"bin_{b.index:02d}.txt"
        _write_text(directory / name, "\n".join(b.tokens) + ("\n" if b.tokens else ""))
        lines.append(f"{b.index}\t{name}")
    manifest = directory / "manifest.tsv"
    _write_text(manifest, "\n".join(lines) + "\n")
    _write_text(directory / "alphabet.json",
                json.dumps(corpus.alphabet.to_dict(), ensure_ascii=False, indent=2) + "\n")
    return manifest


def load_plain_corpus(manifest_path, *, alphabet: Alphabet | None = None,
                      condition: Condition = Condition.TARGET) -> TimeBinnedCorpus:
    """Load a corpus from a `bin_index<TAB>path` manifest.

    Paths are resolved relative to the manifest. An alphabet.json sidecar
    next to the manifest is used when no alphabet is passed; otherwise the
    alphabet is inferred from the tokens.
    """
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.tsv"
    base = manifest_path.parent
    entries = []
    with open(manifest_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{manifest_path}:{lineno}: expected bin_index<TAB>path")
            try:
                idx = int(parts[0])
            except ValueError:
                raise CorpusError(f"{manifest_path}:{lineno}: unparseable bin index {parts[0]!r}")
            entries.append((idx, base / parts[1]))
    if not entries:
        raise CorpusError(f"empty manifest {manifest_path}")
    entries.sort()
    bins = []
    for pos, (idx, path) in enumerate(entries, 1):
        if idx != pos:
            raise CorpusError(f"{manifest_path}: bin indices must be consecutive from 1")
        tokens = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        bins.append(TimeBin(idx, path.stem, tuple(tokens)))
    if alphabet is None:
        sidecar = base / "alphabet.json"
        if sidecar.exists():
            alphabet = Alphabet.from_dict(json.loads(sidecar.read_text(encoding="utf-8")))
        else:
            alphabet = Alphabet.from_tokens(t for b in bins for t in b.tokens)
    return TimeBinnedCorpus(alphabet, tuple(bins), condition)
