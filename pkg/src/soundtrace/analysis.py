"""Distance time series, interaction regression and per-dimension discovery.

The reference character's vector is frozen at bin 1; the moving character's
vector is tracked per bin. A change source > moving is claimed when the Bin
effect is negative and significant while the Bin:Control interaction is
significant with the opposite sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import Condition, TimeBin, TimeBinnedCorpus
from .embedding import EmbeddingError, EmbeddingMatrix, align_bins, count_bin
from .stats import RegressionFit, ols_interaction, t_sf


class AnalysisError(Exception):
    """Precondition failure in the analysis pipeline."""


@dataclass(frozen=True)
class DistanceSeries:
    ref_char: str
    moving_char: str
    condition: Condition
    replicate_id: int
    points: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class DimensionReport:
    pattern: str
    slope: float
    pearson_r: float
    p_value: float


@dataclass(frozen=True)
class PerDimensionResult:
    reports: tuple[DimensionReport, ...]
    n_constant_skipped: int


@dataclass
class ExperimentResult:
    fit: RegressionFit
    series: list[DistanceSeries]
    target_embeddings: list[EmbeddingMatrix]  # replicate 0, for dimension analysis

    def rows(self) -> list[tuple[float, float, float]]:
        return series_rows(self.series)


def distance_series(embeddings: Sequence[EmbeddingMatrix], ref_char: str,
                    moving_char: str, *, condition: Condition = Condition.TARGET,
                    replicate_id: int = 0) -> DistanceSeries:
    """Euclidean distance from ref_char at bin 1 to moving_char at each bin."""
    if len(embeddings) < 2:
        raise AnalysisError("need at least 2 bins of embeddings")
    widths = {len(e.dimensions) for e in embeddings}
    if len(widths) != 1:
        raise AnalysisError("embeddings must share one context basis")
    try:
        ref = embeddings[0].vector(ref_char)
    except EmbeddingError:
        raise AnalysisError(f"character {ref_char!r} missing from bin 1") from None
    points = []
    for i, emb in enumerate(embeddings, 1):
        try:
            mv = emb.vector(moving_char)
        except EmbeddingError:
            raise AnalysisError(f"character {moving_char!r} missing from bin {i}") from None
        points.append((i, float(np.linalg.norm(ref - mv))))
    return DistanceSeries(ref_char, moving_char, condition, replicate_id, tuple(points))


def series_rows(series: Sequence[DistanceSeries]) -> list[tuple[float, float, float]]:
    rows = []
    for s in series:
        flag = 1.0 if s.condition is Condition.CONTROL else 0.0
        rows.extend((float(b), flag, d) for b, d in s.points)
    return rows


def build_pair_embeddings(target: TimeBinnedCorpus, control: TimeBinnedCorpus, n: int):
    """Per-bin PPMI matrices for both conditions on one shared basis."""
    if target.n_bins != control.n_bins:
        raise AnalysisError("target and control must share bin structure")
    counts = [count_bin(b, n, target.alphabet) for b in target.bins]
    counts += [count_bin(b, n, control.alphabet) for b in control.bins]
    dims, mats = align_bins(counts)
    k = target.n_bins
    return dims, mats[:k], mats[k:]


def _pair_series(target: TimeBinnedCorpus, control: TimeBinnedCorpus, ref_char: str,
                 moving_char: str, n: int, replicate_id: int):
    _, tmats, cmats = build_pair_embeddings(target, control, n)
    ts = distance_series(tmats, ref_char, moving_char,
                         condition=Condition.TARGET, replicate_id=replicate_id)
    cs = distance_series(cmats, ref_char, moving_char,
                         condition=Condition.CONTROL, replicate_id=replicate_id)
    return ts, cs, tmats


def run_generated_experiment(pair_factory: Callable[[int], tuple[TimeBinnedCorpus, TimeBinnedCorpus]],
                             ref_char: str, moving_char: str, n: int, *,
                             replicates: int = 10, seed: int = 0) -> ExperimentResult:
    """Replicate by regeneration: one fresh (target, control) pair per seed.

    The factory receives a derived integer seed per replicate; all replicate
    rows are pooled into a single Distance ~ Bin * Corpus fit.
    """
    if replicates < 1:
        raise AnalysisError("need at least 1 replicate")
    children = np.random.SeedSequence(seed).spawn(replicates)
    series: list[DistanceSeries] = []
    first_target = []
    for r, child in enumerate(children):
        target, control = pair_factory(int(child.generate_state(1)[0]))
        ts, cs, tmats = _pair_series(target, control, ref_char, moving_char, n, r)
        series.extend([ts, cs])
        if r == 0:
            first_target = tmats
    fit = ols_interaction(series_rows(series))
    return ExperimentResult(fit, series, first_target)


def _resample_bins(corpus: TimeBinnedCorpus, rng: np.random.Generator) -> TimeBinnedCorpus:
    bins = []
    for b in corpus.bins:
        k = len(b.tokens)
        idx = rng.integers(0, k, size=k) if k else np.empty(0, int)
        bins.append(TimeBin(b.index, b.label, tuple(b.tokens[i] for i in idx)))
    return TimeBinnedCorpus(corpus.alphabet, tuple(bins), corpus.condition)


def run_experiment(target: TimeBinnedCorpus, control: TimeBinnedCorpus,
                   ref_char: str, moving_char: str, n: int, *,
                   replicates: int = 10, seed: int = 0) -> ExperimentResult:
    """Replicate by bootstrap: resample tokens within each bin per replicate.

    Used when corpora are loaded rather than generated (no generative seed to
    vary). target_embeddings come from the original, un-resampled target.
    """
    if target.n_bins != control.n_bins:
        raise AnalysisError("target and control must share bin structure")
    if replicates < 1:
        raise AnalysisError("need at least 1 replicate")
    children = np.random.SeedSequence(seed).spawn(replicates)
    series: list[DistanceSeries] = []
    for r, child in enumerate(children):
        sub_t, sub_c = child.spawn(2)
        t = _resample_bins(target, np.random.default_rng(sub_t))
        c = _resample_bins(control, np.random.default_rng(sub_c))
        ts, cs, _ = _pair_series(t, c, ref_char, moving_char, n, r)
        series.extend([ts, cs])
    fit = ols_interaction(series_rows(series))
    _, tmats, _ = build_pair_embeddings(target, control, n)
    return ExperimentResult(fit, series, tmats)


def per_dimension_analysis(embeddings: Sequence[EmbeddingMatrix], ref_char: str,
                           moving_char: str, r_threshold: float = -0.2,
                           p_threshold: float = 0.05, *,
                           signed: bool = False) -> PerDimensionResult:
    """Per-context convergence: slope and Pearson r of the per-bin difference.

    For each dimension d the series is |v(ref, bin1)[d] - v(moving, bin_i)[d]|
    (signed difference behind the flag), regressed on the bin index. Dimensions
    with r < r_threshold and p < p_threshold are kept and sorted by slope,
    steepest convergence first. Constant series are skipped and counted.
    """
    m = len(embeddings)
    if m < 3:
        raise AnalysisError("per-dimension analysis needs at least 3 bins")
    widths = {len(e.dimensions) for e in embeddings}
    if len(widths) != 1:
        raise AnalysisError("embeddings must share one context basis")
    try:
        ref = embeddings[0].vector(ref_char)
    except EmbeddingError:
        raise AnalysisError(f"character {ref_char!r} missing from bin 1") from None
    rows = []
    for i, emb in enumerate(embeddings, 1):
        try:
            rows.append(emb.vector(moving_char))
        except EmbeddingError:
            raise AnalysisError(f"character {moving_char!r} missing from bin {i}") from None
    diff = ref[None, :] - np.stack(rows)
    series = diff if signed else np.abs(diff)

    x = np.arange(1, m + 1, dtype=float)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    yc = series - series.mean(axis=0)
    sxy = xc @ yc
    syy = (yc ** 2).sum(axis=0)
    dims = embeddings[0].dimensions
    reports = []
    n_flat = 0
    for j, pattern in enumerate(dims):
        if syy[j] == 0.0:
            n_flat += 1
            continue
        slope = sxy[j] / sxx
        r = sxy[j] / np.sqrt(sxx * syy[j])
        r = max(-1.0, min(1.0, float(r)))
        if abs(r) == 1.0:
            p = 0.0
        else:
            t = r * np.sqrt((m - 2) / (1.0 - r * r))
            p = t_sf(float(t), m - 2)
        if r < r_threshold and p < p_threshold:
            reports.append(DimensionReport(pattern, float(slope), r, p))
    reports.sort(key=lambda d: (d.slope, d.pattern))
    return PerDimensionResult(tuple(reports), n_flat)
