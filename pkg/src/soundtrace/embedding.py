"""Directional positional n-gram counts and PPMI character embeddings.

Each character occurrence is paired with every length-n window that contains
it; the window with the character's cell replaced by `_` is the context
pattern, so preceding and following material stay distinguished. Words are
padded with n-1 boundary symbols per side, which also lets edge characters
receive full window coverage. Counts are raw (no smoothing); PPMI uses log
base 2 and clips at zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Alphabet, TimeBin


class EmbeddingError(Exception):
    """Undefined embedding request or malformed counts."""


def extract_contexts(word: str, n: int, boundary: str = "#") -> list[tuple[str, str]]:
    """Enumerate (character, context pattern) pairs for one word.

    Every character yields up to n directional contexts, one per placement of
    the character inside an n-window over the padded word.
    """
    if n < 2:
        raise EmbeddingError("n-gram size must be >= 2")
    pad = boundary * (n - 1)
    s = pad + word + pad
    out = []
    for i, ch in enumerate(word):
        pos = i + n - 1
        for slot in range(n):
            start = pos - slot
            win = s[start:start + n]
            out.append((ch, win[:slot] + "_" + win[slot + 1:]))
    return out


@dataclass(frozen=True)
class CooccurrenceCounts:
    n: int
    counts: dict[tuple[str, str], int]
    char_totals: dict[str, int]
    context_totals: dict[str, int]
    grand_total: int

    @classmethod
    def from_counts(cls, n: int, counts: dict[tuple[str, str], int]) -> "CooccurrenceCounts":
        char_totals: dict[str, int] = {}
        context_totals: dict[str, int] = {}
        for (c, ctx), v in counts.items():
            char_totals[c] = char_totals.get(c, 0) + v
            context_totals[ctx] = context_totals.get(ctx, 0) + v
        return cls(n, dict(counts), char_totals, context_totals, sum(counts.values()))


def count_tokens(tokens: Sequence[str], n: int, alphabet: Alphabet) -> CooccurrenceCounts:
    """Count (character, context) pairs over a token multiset.

    Vectorized: tokens are joined into one stream with n-1 boundary symbols
    between them, which reproduces per-word padding exactly (no window can
    span two tokens).
    """
    if n < 2:
        raise EmbeddingError("n-gram size must be >= 2")
    if not tokens:
        return CooccurrenceCounts(n, {}, {}, {}, 0)
    symbols = alphabet.symbols
    K = len(symbols)
    base = K + 1
    cps = [ord(c) for c in symbols] + [ord(alphabet.boundary)]
    max_cp = max(cps)
    lut = np.full(max_cp + 1, -1, dtype=np.int64)
    for i, cp in enumerate(cps):
        lut[cp] = i

    sep = alphabet.boundary * (n - 1)
    s = sep + sep.join(tokens) + sep
    arr = np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    if arr.max() > max_cp:
        raise EmbeddingError("tokens contain characters outside the alphabet")
    ids = lut[arr]
    if (ids < 0).any():
        raise EmbeddingError("tokens contain characters outside the alphabet")

    tgt = np.flatnonzero(ids != K)
    char_ids = ids[tgt]
    P = base ** (n - 1)
    n_pat = n * P
    keys = []
    for slot in range(n):
        pid = np.full(len(tgt), slot * P, dtype=np.int64)
        mult = 1
        for j in range(n):
            if j == slot:
                continue
            pid += ids[tgt - slot + j] * mult
            mult *= base
        keys.append(char_ids * n_pat + pid)
    cnt = np.bincount(np.concatenate(keys))
    nz = np.flatnonzero(cnt)

    def decode_pattern(pid: int) -> str:
        slot, rem = divmod(pid, P)
        ctx = []
        for _ in range(n - 1):
            rem, d = rem // base, rem % base
            ctx.append(symbols[d] if d < K else alphabet.boundary)
        return "".join(ctx[:slot]) + "_" + "".join(ctx[slot:])

    counts = {}
    for key in nz:
        key = int(key)
        c_id, pid = divmod(key, n_pat)
        counts[(symbols[c_id], decode_pattern(pid))] = int(cnt[key])
    return CooccurrenceCounts.from_counts(n, counts)


def count_bin(bin: TimeBin, n: int, alphabet: Alphabet) -> CooccurrenceCounts:
    """Sum extract_contexts over all tokens of a bin, multiplicity respected."""
    return count_tokens(bin.tokens, n, alphabet)


@dataclass(eq=False)
class EmbeddingMatrix:
    """PPMI vectors per character on an explicit, ordered context basis."""

    n: int
    dimensions: tuple[str, ...]
    chars: tuple[str, ...]
    matrix: np.ndarray  # shape (len(chars), len(dimensions)), entries >= 0

    def __post_init__(self):
        self.dimensions = tuple(self.dimensions)
        self.chars = tuple(self.chars)
        self.matrix = np.asarray(self.matrix, float)
        if self.matrix.shape != (len(self.chars), len(self.dimensions)):
            raise EmbeddingError("matrix shape does not match chars x dimensions")
        self._char_index = {c: i for i, c in enumerate(self.chars)}
        self._dim_index = {d: i for i, d in enumerate(self.dimensions)}

    def vector(self, char: str) -> np.ndarray:
        try:
            return self.matrix[self._char_index[char]]
        except KeyError:
            raise EmbeddingError(f"character {char!r} has no distribution in this matrix") from None

    def entry(self, char: str, pattern: str) -> float:
        row = self.vector(char)
        j = self._dim_index.get(pattern)
        return float(row[j]) if j is not None else 0.0

    def save_tsv(self, path, *, bin_label: str | None = None,
                 condition: str | None = None) -> None:
        path = Path(path)
        lines = ["char\t" + "\t".join(self.dimensions)]
        for c, row in zip(self.chars, self.matrix):
            lines.append(c + "\t" + "\t".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        sidecar = {"n": self.n, "bin_label": bin_label, "condition": condition}
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(sidecar, ensure_ascii=False) + "\n", encoding="utf-8")

    @classmethod
    def load_tsv(cls, path) -> "EmbeddingMatrix":
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        dims = tuple(lines[0].split("\t")[1:])
        chars, rows = [], []
        for line in lines[1:]:
            parts = line.split("\t")
            chars.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
        sidecar = path.with_suffix(path.suffix + ".json")
        n = 2
        if sidecar.exists():
            n = int(json.loads(sidecar.read_text(encoding="utf-8"))["n"])
        return cls(n, dims, tuple(chars), np.array(rows, float))


def ppmi(counts: CooccurrenceCounts, dimensions: Sequence[str]) -> EmbeddingMatrix:
    """PPMI transform on an explicit context basis.

    entry(c, ctx) = max(0, log2(count(c,ctx) * grand / (char_total(c) *
    context_total(ctx)))); unobserved pairs are 0. Contexts outside
    `dimensions` are ignored for the vectors but still feed the marginals.
    """
    if counts.grand_total <= 0:
        raise EmbeddingError("cannot compute PPMI from empty counts")
    dims = tuple(dimensions)
    dim_index = {d: i for i, d in enumerate(dims)}
    chars = tuple(sorted(counts.char_totals))
    char_index = {c: i for i, c in enumerate(chars)}
    M = np.zeros((len(chars), len(dims)))
    grand = counts.grand_total
    for (c, ctx), v in counts.counts.items():
        j = dim_index.get(ctx)
        if j is None:
            continue
        val = np.log2(v * grand / (counts.char_totals[c] * counts.context_totals[ctx]))
        if val > 0:
            M[char_index[c], j] = val
    return EmbeddingMatrix(counts.n, dims, chars, M)


def align_bins(per_bin_counts: Sequence[CooccurrenceCounts]):
    """Express all bins' PPMI matrices on one shared, sorted context basis.

    Returns (dimensions, matrices). The basis is the union of every context
    observed in any of the given bins; locally unobserved contexts are 0.
    """
    if not per_bin_counts:
        raise EmbeddingError("no counts to align")
    sizes = {c.n for c in per_bin_counts}
    if len(sizes) != 1:
        raise EmbeddingError(f"mixed n-gram sizes: {sorted(sizes)}")
    dims = sorted({ctx for c in per_bin_counts for ctx in c.context_totals})
    return tuple(dims), [ppmi(c, dims) for c in per_bin_counts]
