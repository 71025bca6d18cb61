"""Sound-change rule engine.

Rules follow the `source > target / left _ right` notation: `#` matches the
word edge, `{a,b}` is a disjunction of alternatives, and capital letters name
character classes declared on the alphabet (e.g. V). Sites are matched against
the original word and all rewrites applied simultaneously, so a rewrite never
feeds another within the same pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Alphabet, TimeBin, TimeBinnedCorpus


class RuleError(Exception):
    """Unparseable or inapplicable rewrite rule."""


class ChangeError(Exception):
    """Invalid change application request."""


# a context side is a disjunction of element sequences; an element is a
# literal character, '#' (word edge) or an uppercase class name
Side = tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class ChangeRule:
    source: str
    target: str
    left: Side = ((),)
    right: Side = ((),)

    def __post_init__(self):
        if len(self.source) != 1 or len(self.target) != 1:
            raise RuleError("source and target must be single characters")
        if self.source == self.target:
            raise RuleError("source and target must differ")
        object.__setattr__(self, "left", tuple(tuple(a) for a in self.left))
        object.__setattr__(self, "right", tuple(tuple(a) for a in self.right))
        if not self.left or not self.right:
            raise RuleError("context sides need at least one alternative")

    def __str__(self) -> str:
        return f"{self.source} > {self.target} / {_side_str(self.left)} _ {_side_str(self.right)}"


def _side_str(side: Side) -> str:
    alts = ["".join(a) for a in side]
    if len(alts) == 1:
        return alts[0]
    return "{" + ",".join(alts) + "}"


def _parse_side(text: str, where: str) -> Side:
    text = text.strip()
    if not text:
        return ((),)
    if text.startswith("{"):
        if not text.endswith("}"):
            raise RuleError(f"unclosed '{{' in {where} context: {text!r}")
        alts = [a.strip() for a in text[1:-1].split(",")]
        return tuple(tuple(ch for ch in a if not ch.isspace()) for a in alts)
    return (tuple(ch for ch in text if not ch.isspace()),)


def parse_rule(text: str) -> ChangeRule:
    """Parse one `source > target / left _ right` line."""
    if text.count("/") != 1:
        raise RuleError(f"rule needs exactly one '/': {text!r}")
    lhs, ctx = text.split("/")
    if lhs.count(">") != 1:
        raise RuleError(f"rule needs exactly one '>': {text!r}")
    source, target = (p.strip() for p in lhs.split(">"))
    if ctx.count("_") != 1:
        raise RuleError(f"context needs exactly one '_': {text!r}")
    left_s, right_s = ctx.split("_")
    return ChangeRule(source, target, _parse_side(left_s, "left"), _parse_side(right_s, "right"))


def parse_rules(path) -> list[ChangeRule]:
    """Parse a rule file, one rule per non-blank line."""
    rules = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rules.append(parse_rule(line))
        except RuleError as e:
            raise RuleError(f"{path}:{lineno}: {e}") from None
    if not rules:
        raise RuleError(f"no rules in {path}")
    return rules


def _element_set(elem: str, alphabet: Alphabet) -> frozenset[str]:
    if elem == alphabet.boundary:
        return frozenset({alphabet.boundary})
    if elem.isupper():
        if elem not in alphabet.classes:
            raise RuleError(f"unknown character class {elem!r} (declared: {sorted(alphabet.classes)})")
        return alphabet.classes[elem]
    return frozenset({elem})


def _char_at(word: str, pos: int, boundary: str) -> str:
    return word[pos] if 0 <= pos < len(word) else boundary


def _side_matches(word: str, side: Side, offsets_of, alphabet: Alphabet) -> bool:
    for alt in side:
        ok = True
        for j, elem in enumerate(alt):
            ch = _char_at(word, offsets_of(len(alt), j), alphabet.boundary)
            if ch not in _element_set(elem, alphabet):
                ok = False
                break
        if ok:
            return True
    return False


def match_sites(word: str, rule: ChangeRule, alphabet: Alphabet) -> list[int]:
    """Return every index whose character and contexts match the rule.

    `#` in a context matches the word edge; positions beyond the edge behave
    as an unbounded run of boundary symbols.
    """
    sites = []
    for i, ch in enumerate(word):
        if ch != rule.source:
            continue
        left_ok = _side_matches(word, rule.left, lambda n, j: i - n + j, alphabet)
        right_ok = _side_matches(word, rule.right, lambda n, j: i + 1 + j, alphabet)
        if left_ok and right_ok:
            sites.append(i)
    return sites


def _element_lut(elem: str, alphabet: Alphabet, size: int) -> np.ndarray:
    lut = np.zeros(size, dtype=bool)
    for ch in _element_set(elem, alphabet):
        lut[ord(ch)] = True
    return lut


def _match_stream(arr: np.ndarray, src_cp: int, rule: ChangeRule,
                  alphabet: Alphabet, luts: dict) -> np.ndarray:
    idx = np.flatnonzero(arr == src_cp)
    if len(idx) == 0:
        return idx
    ok = np.zeros(len(idx), dtype=bool)
    for alt in rule.left:
        alt_ok = np.ones(len(idx), dtype=bool)
        for j, elem in enumerate(alt):
            alt_ok &= luts[elem][arr[idx - len(alt) + j]]
        ok |= alt_ok
    ok_r = np.zeros(len(idx), dtype=bool)
    for alt in rule.right:
        alt_ok = np.ones(len(idx), dtype=bool)
        for j, elem in enumerate(alt):
            alt_ok &= luts[elem][arr[idx + 1 + j]]
        ok_r |= alt_ok
    return idx[ok & ok_r]


def apply_change(corpus: TimeBinnedCorpus, rule: ChangeRule, schedule: "Schedule",
                 seed) -> TimeBinnedCorpus:
    """Rewrite matched sites per bin with the scheduled probability.

    Each matched site flips source -> target independently with the bin's
    probability; all matches are computed on the original words. Token counts
    and word lengths are preserved exactly. Deterministic per seed. The caller
    keeps the unmodified input as the control twin.
    """
    if len(schedule.probabilities) != corpus.n_bins:
        raise ChangeError(f"schedule has {len(schedule.probabilities)} entries "
                          f"for {corpus.n_bins} bins")
    alphabet = corpus.alphabet
    if rule.source not in alphabet or rule.target not in alphabet:
        raise ChangeError(f"rule characters {rule.source!r}/{rule.target!r} "
                          "must be in the alphabet")
    pad = max(1,
              max(len(a) for a in rule.left),
              max(len(a) for a in rule.right))
    sep = alphabet.boundary * pad
    max_cp = max(ord(c) for c in alphabet.symbols + (alphabet.boundary,))
    elems = {e for side in (rule.left, rule.right) for alt in side for e in alt}
    luts = {e: _element_lut(e, alphabet, max_cp + 1) for e in elems}
    src_cp, tgt_cp = ord(rule.source), ord(rule.target)

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(corpus.n_bins)
    new_bins = []
    for b, prob, child in zip(corpus.bins, schedule.probabilities, children):
        if prob == 0.0 or not b.tokens:
            new_bins.append(b)
            continue
        s = sep + sep.join(b.tokens) + sep
        arr = np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).copy()
        sites = _match_stream(arr, src_cp, rule, alphabet, luts)
        if len(sites):
            if prob >= 1.0:
                flip = sites
            else:
                rng = np.random.default_rng(child)
                flip = sites[rng.random(len(sites)) < prob]
            arr[flip] = tgt_cp
        out = arr.tobytes().decode("utf-32-le")
        tokens = tuple(t for t in out.split(alphabet.boundary) if t)
        new_bins.append(TimeBin(b.index, b.label, tokens))
    return TimeBinnedCorpus(alphabet, tuple(new_bins), corpus.condition)


@dataclass(frozen=True)
class Schedule:
    """Per-bin application probabilities."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if not probs:
            raise ChangeError("schedule must not be empty")
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise ChangeError("schedule probabilities must lie in [0, 1]")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def linear(cls, n_bins: int, start: float = 0.0, end: float = 1.0) -> "Schedule":
        if n_bins < 2:
            raise ChangeError("a linear schedule needs at least 2 bins")
        step = (end - start) / (n_bins - 1)
        return cls(tuple(start + i * step for i in range(n_bins)))

    @classmethod
    def zero(cls, n_bins: int) -> "Schedule":
        return cls((0.0,) * n_bins)

    @classmethod
    def constant(cls, n_bins: int, p: float) -> "Schedule":
        return cls((p,) * n_bins)
