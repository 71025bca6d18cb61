"""Weighted-lexicon corpus sampler.

Ships a synthetic Danish-like word-frequency list so a synchronic corpus with
realistic spelling structure (intervocalic g, final -g after vowel, the -ig /
-igt suffixes, a k inventory) can be sampled at any size. Each bin is an
independent draw from the same distribution, so bins are exchangeable before
change injection.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import (Alphabet, Condition, CorpusError, DEFAULT_VOWELS, TimeBin,
                     TimeBinnedCorpus)

_BUNDLED = "danish_like_lexicon.tsv"


def load_lexicon(path=None) -> tuple[list[str], np.ndarray]:
    """Read a `word<TAB>weight` list; defaults to the bundled lexicon."""
    if path is None:
        text = (resources.files("soundtrace") / "data" / _BUNDLED).read_text(encoding="utf-8")
        source = _BUNDLED
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    words, weights = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"{source}:{lineno}: expected word<TAB>weight")
        w = float(parts[1])
        if w <= 0:
            raise CorpusError(f"{source}:{lineno}: weight must be positive")
        words.append(parts[0])
        weights.append(w)
    if not words:
        raise CorpusError(f"empty lexicon {source}")
    if len(set(words)) != len(words):
        raise CorpusError(f"duplicate words in lexicon {source}")
    return words, np.asarray(weights, float)


def lexicon_alphabet(words, vowels: str = DEFAULT_VOWELS) -> Alphabet:
    return Alphabet.from_tokens(words, vowels=vowels)


def generate_corpus(n_tokens_per_bin: int, n_bins: int, seed, *,
                    lexicon_path=None, vowels: str = DEFAULT_VOWELS,
                    condition: Condition = Condition.TARGET) -> TimeBinnedCorpus:
    """Sample n_bins bins of n_tokens_per_bin tokens from the lexicon."""
    if n_tokens_per_bin <= 0:
        raise CorpusError("n_tokens_per_bin must be positive")
    if n_bins < 2:
        raise CorpusError("need at least 2 bins")
    words, weights = load_lexicon(lexicon_path)
    p = weights / weights.sum()
    # alphabet from the full type list so every bin shares one inventory
    alphabet = lexicon_alphabet(words, vowels)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    bins = []
    for i, child in enumerate(ss.spawn(n_bins), 1):
        rng = np.random.default_rng(child)
        idx = rng.choice(len(words), size=n_tokens_per_bin, p=p)
        bins.append(TimeBin(i, f"bin {i}", tuple(words[j] for j in idx)))
    return TimeBinnedCorpus(alphabet, tuple(bins), condition)
