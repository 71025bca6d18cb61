"""Constraint-respecting generator for small CV toy languages.

The default spec is Parupa: CV syllables only, /b p/ word-initially, voiceless
stops before high vowels, voiced stops before non-high vowels, /r/ before any
vowel, and every consonant before /a/. The sampler picks a syllable count from
a configurable distribution, a consonant uniformly from the set permitted in
that position, then a vowel uniformly from the set permitted after that
consonant; the probabilities are a documented choice, only the constraints are
fixed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import Alphabet, Condition, TimeBin, TimeBinnedCorpus


class GenerationError(Exception):
    """Invalid phonotactic specification or generation request."""


def _default_vowels_after() -> dict[str, tuple[str, ...]]:
    return {
        "p": tuple("iua"), "t": tuple("iua"), "k": tuple("iua"),
        "b": tuple("eoa"), "d": tuple("eoa"), "g": tuple("eoa"),
        "r": tuple("ieuoa"),
    }


@dataclass(frozen=True)
class PhonotacticSpec:
    consonants: tuple[str, ...] = tuple("ptkbdgr")
    vowels: tuple[str, ...] = tuple("ieuoa")
    high_vowels: tuple[str, ...] = ("i", "u")
    non_high_vowels: tuple[str, ...] = ("e", "o")
    word_initial_consonants: tuple[str, ...] = ("b", "p")
    min_syllables: int = 1
    max_syllables: int = 4
    syllable_weights: tuple[float, ...] | None = None
    vowels_after: Mapping[str, tuple[str, ...]] = field(default_factory=_default_vowels_after)

    def __post_init__(self):
        cons, vows = set(self.consonants), set(self.vowels)
        if not cons or not vows:
            raise GenerationError("need non-empty consonant and vowel sets")
        if cons & vows:
            raise GenerationError("consonants and vowels must be disjoint")
        if not set(self.high_vowels) <= vows or not set(self.non_high_vowels) <= vows:
            raise GenerationError("vowel height classes must be subsets of the vowels")
        if set(self.high_vowels) & set(self.non_high_vowels):
            raise GenerationError("high and non-high vowel classes overlap")
        if not set(self.word_initial_consonants) <= cons:
            raise GenerationError("word-initial consonants must be a subset of the consonants")
        if not (1 <= self.min_syllables <= self.max_syllables):
            raise GenerationError("need 1 <= min_syllables <= max_syllables")
        n_lengths = self.max_syllables - self.min_syllables + 1
        if self.syllable_weights is not None:
            w = tuple(float(x) for x in self.syllable_weights)
            if len(w) != n_lengths or any(x < 0 for x in w) or sum(w) <= 0:
                raise GenerationError("syllable_weights must be non-negative with one entry per length")
            object.__setattr__(self, "syllable_weights", w)
        after = {c: tuple(v) for c, v in dict(self.vowels_after).items()}
        if set(after) != cons:
            raise GenerationError("vowels_after must map every consonant")
        for c, allowed in after.items():
            if not allowed or not set(allowed) <= vows:
                raise GenerationError(f"vowels_after[{c!r}] must be a non-empty subset of the vowels")
        object.__setattr__(self, "vowels_after", after)

    def alphabet(self) -> Alphabet:
        symbols = tuple(sorted(self.consonants + self.vowels))
        return Alphabet(symbols, classes={"V": frozenset(self.vowels),
                                          "C": frozenset(self.consonants)})

    def to_dict(self) -> dict:
        return {
            "consonants": "".join(self.consonants),
            "vowels": "".join(self.vowels),
            "high_vowels": "".join(self.high_vowels),
            "non_high_vowels": "".join(self.non_high_vowels),
            "word_initial_consonants": "".join(self.word_initial_consonants),
            "min_syllables": self.min_syllables,
            "max_syllables": self.max_syllables,
            "syllable_weights": list(self.syllable_weights) if self.syllable_weights else None,
            "vowels_after": {c: "".join(v) for c, v in self.vowels_after.items()},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "PhonotacticSpec":
        kwargs = {}
        for key in ("consonants", "vowels", "high_vowels", "non_high_vowels",
                    "word_initial_consonants"):
            if key in d:
                kwargs[key] = tuple(d[key])
        for key in ("min_syllables", "max_syllables"):
            if key in d:
                kwargs[key] = int(d[key])
        if d.get("syllable_weights") is not None:
            kwargs["syllable_weights"] = tuple(d["syllable_weights"])
        if "vowels_after" in d:
            kwargs["vowels_after"] = {c: tuple(v) for c, v in d["vowels_after"].items()}
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "PhonotacticSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n",
                              encoding="utf-8")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def generate_words(spec: PhonotacticSpec, count: int, rng) -> list[str]:
    """Sample `count` independent words; vectorized over all syllables."""
    if count <= 0:
        return []
    rng = _rng(rng)
    cons = list(spec.consonants)
    cons_cp = np.array([ord(c) for c in cons], dtype=np.uint32)
    after = [spec.vowels_after[c] for c in cons]
    max_v = max(len(a) for a in after)
    vow_table = np.zeros((len(cons), max_v), dtype=np.uint32)
    vow_n = np.zeros(len(cons), dtype=np.int64)
    for i, allowed in enumerate(after):
        vow_n[i] = len(allowed)
        for j, v in enumerate(allowed):
            vow_table[i, j] = ord(v)
    initial_idx = np.array([cons.index(c) for c in spec.word_initial_consonants])

    lengths_range = np.arange(spec.min_syllables, spec.max_syllables + 1)
    if spec.syllable_weights is not None:
        w = np.asarray(spec.syllable_weights, float)
        lengths = rng.choice(lengths_range, size=count, p=w / w.sum())
    else:
        lengths = rng.choice(lengths_range, size=count)
    total = int(lengths.sum())

    cons_idx = rng.integers(0, len(cons), size=total)
    starts = np.zeros(count, dtype=np.int64)
    starts[1:] = np.cumsum(lengths)[:-1]
    cons_idx[starts] = initial_idx[rng.integers(0, len(initial_idx), size=count)]
    vsel = (rng.random(total) * vow_n[cons_idx]).astype(np.int64)

    chars = np.empty(2 * total, dtype=np.uint32)
    chars[0::2] = cons_cp[cons_idx]
    chars[1::2] = vow_table[cons_idx, vsel]
    big = chars.tobytes().decode("utf-32-le")
    bounds = np.cumsum(2 * lengths)
    words, prev = [], 0
    for end in bounds:
        end = int(end)
        words.append(big[prev:end])
        prev = end
    return words


def generate_word(spec: PhonotacticSpec, rng) -> str:
    return generate_words(spec, 1, rng)[0]


def generate_corpus(spec: PhonotacticSpec, n_words_per_bin: int, n_bins: int,
                    seed, condition: Condition = Condition.TARGET) -> TimeBinnedCorpus:
    """Build a corpus of n_bins bins of independently sampled words.

    All bins are drawn from the identical distribution, so there is no drift
    before change injection. Deterministic per seed.
    """
    if n_words_per_bin <= 0:
        raise GenerationError("n_words_per_bin must be positive")
    if n_bins < 2:
        raise GenerationError("need at least 2 bins")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    bins = []
    for i, child in enumerate(ss.spawn(n_bins), 1):
        words = generate_words(spec, n_words_per_bin, np.random.default_rng(child))
        bins.append(TimeBin(i, f"bin {i}", tuple(words)))
    return TimeBinnedCorpus(spec.alphabet(), tuple(bins), condition)
