"""Minimal inferential statistics: Pearson correlation, simple linear
regression, Fisher comparison of two independent correlations, and Spearman
rank correlation for monotone-trend checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Rational normal-CDF approximation (Abramowitz & Stegun 26.2.17),
# absolute error below 7.5e-8: 1 - Phi(x) = phi(x) * poly(1/(1 + p x)).
_AS_P = 0.2316419
_AS_B = (0.319381530, -0.356563782, 1.781477937, -1.821255978, 1.330274429)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_cdf(x: float) -> float:
    """Standard normal CDF via the Abramowitz-Stegun rational approximation."""
    ax = abs(x)
    k = 1.0 / (1.0 + _AS_P * ax)
    poly = k * (_AS_B[0] + k * (_AS_B[1] + k * (_AS_B[2] + k * (_AS_B[3] + k * _AS_B[4]))))
    tail = _INV_SQRT_2PI * math.exp(-0.5 * ax * ax) * poly
    return 1.0 - tail if x >= 0 else tail


@dataclass(frozen=True)
class PairedSeries:
    """Two equal-length coordinate lists (length >= 3, finite values)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
            raise ValueError("paired series must be 1-D arrays of equal length")
        if x.size < 3:
            raise ValueError("paired series needs at least three points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("paired series values must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.size)


def _coerce(x, y) -> PairedSeries:
    if isinstance(x, PairedSeries):
        return x
    return PairedSeries(np.asarray(x), np.asarray(y))


def pearson_r(x, y=None) -> float:
    """Product-moment correlation; raises when either coordinate is constant."""
    s = _coerce(x, y)
    dx = s.x - s.x.mean()
    dy = s.y - s.y.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("correlation undefined for a zero-variance coordinate")
    return float(dx @ dy) / math.sqrt(vx * vy)


def linear_regression(x, y=None) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, r)."""
    s = _coerce(x, y)
    r = pearson_r(s)
    dx = s.x - s.x.mean()
    dy = s.y - s.y.mean()
    slope = float(dx @ dy) / float(dx @ dx)
    intercept = float(s.y.mean() - slope * s.x.mean())
    return slope, intercept, r


def fisher_compare(r1: float, n1: int, r2: float, n2: int) -> tuple[float, float]:
    """Fisher z comparison of two correlations from independent samples.

    Returns (z, two-sided p).  z = (atanh r1 - atanh r2) / sqrt(1/(n1-3) + 1/(n2-3)).
    """
    for r, n in ((r1, n1), (r2, n2)):
        if not abs(r) < 1.0:
            raise ValueError("correlations must satisfy |r| < 1")
        if n <= 3:
            raise ValueError("each sample must have n > 3")
    z = (math.atanh(r1) - math.atanh(r2)) / math.sqrt(1.0 / (n1 - 3) + 1.0 / (n2 - 3))
    if z == 0.0:
        return 0.0, 1.0
    p = 2.0 * (1.0 - norm_cdf(abs(z)))
    return z, min(p, 1.0)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average of ranks i+1 .. j+1
        i = j + 1
    return ranks


def spearman_rho(x, y=None) -> float:
    """Rank correlation with average ranks for ties.

    Without ties this uses the exact rank-difference formula (so strictly
    monotone inputs give exactly +/-1); with ties it falls back to Pearson
    correlation of the rank vectors.
    """
    s = _coerce(x, y)
    rx = _average_ranks(s.x)
    ry = _average_ranks(s.y)
    ties = np.unique(s.x).size < s.n or np.unique(s.y).size < s.n
    if ties:
        return pearson_r(rx, ry)
    d = rx - ry
    n = s.n
    return 1.0 - 6.0 * float(d @ d) / (n * (n * n - 1.0))
