"""Self-contained statistics kernel.

OLS with a categorical interaction (Distance ~ Bin * Corpus), two-sided
Student-t p-values via the regularized incomplete beta function, and Pearson
correlation with significance. No external stats dependency; tests cross-check
against independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TERMS = ("Intercept", "Bin", "Control", "Bin:Control")


class StatsError(Exception):
    """Degenerate input to a statistical routine."""


@dataclass(frozen=True)
class RegressionFit:
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    residual_df: int
    r_squared: float


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for the incomplete beta (modified Lentz)
    MAXIT, EPS, FPMIN = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise StatsError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatsError("betainc requires a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_sf(t: float, df: int) -> float:
    """Two-sided p-value P(|T| >= t) under Student's t with df degrees."""
    if df < 1:
        raise StatsError("t_sf requires df >= 1")
    t = float(t)
    if math.isnan(t):
        return float("nan")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Sample Pearson correlation and its two-sided p-value (t with n-2 df)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.shape != y.shape or x.ndim != 1:
        raise StatsError("pearson needs two equal-length 1-d sequences")
    n = len(x)
    if n < 3:
        raise StatsError("pearson needs at least 3 points")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("pearson undefined for flat (zero-variance) input")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, t_sf(t, n - 2)


def ols_interaction(rows: Sequence[tuple[float, float, float]]) -> RegressionFit:
    """Fit distance ~ bin * is_control by OLS.

    `rows` holds (bin, is_control, distance) triples. Estimates come from a QR
    factorization of the design [1, bin, is_control, bin*is_control]; a
    rank-deficient design raises naming the collinear column rather than
    silently dropping a term.
    """
    data = np.asarray(rows, float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise StatsError("rows must be (bin, is_control, distance) triples")
    n = data.shape[0]
    if n < 5:
        raise StatsError(f"need at least 5 rows, got {n}")
    b, c, y = data[:, 0], data[:, 1], data[:, 2]
    X = np.column_stack([np.ones(n), b, c, b * c])
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    tol = diag.max() * n * np.finfo(float).eps * 100
    bad = [TERMS[i] for i in range(4) if diag[i] <= tol]
    if bad:
        raise StatsError(f"design matrix is rank deficient; collinear column(s): {', '.join(bad)}")
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    df = n - 4
    rss = float(resid @ resid)
    sigma2 = rss / df
    r_inv = np.linalg.inv(R)
    cov = sigma2 * (r_inv @ r_inv.T)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    t_stats, p_values = [], []
    for est, s in zip(beta, se):
        if s == 0.0:
            t = 0.0 if est == 0.0 else math.copysign(float("inf"), est)
        else:
            t = est / s
        t_stats.append(float(t))
        p_values.append(t_sf(t, df))
    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0.0:
        r2 = max(0.0, min(1.0, 1.0 - rss / tss))
    else:
        r2 = 1.0 if rss == 0.0 else 0.0
    return RegressionFit(
        coefficients=dict(zip(TERMS, (float(v) for v in beta))),
        std_errors=dict(zip(TERMS, (float(v) for v in se))),
        t_stats=dict(zip(TERMS, t_stats)),
        p_values=dict(zip(TERMS, p_values)),
        residual_df=df,
        r_squared=r2,
    )
