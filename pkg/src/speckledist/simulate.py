"""Monte-Carlo speckle amplitude generators.

The physical ground truth is the random phasor sum: each amplitude is the
modulus of M unit phasors with i.i.d. Uniform(-pi, pi) phases, divided by
sqrt(mean scatterer count) so the mean square tends to 1 without post-hoc
scaling.  M is either fixed (fully developed limit as M grows) or negative
binomial (scatterer-number fluctuations; the amplitude then tends to a
K distribution with the same shape alpha).

Closed-form generators (Rayleigh, K, Burr) use inverse-CDF or gamma-mixture
sampling.  Every generator is a pure function of (arguments, seed): equal
seeds give bit-identical output, and generation may be parallelized
externally by splitting the index range and deriving per-range seeds as
``seed XOR range_start`` (see `derived_seed`).
"""

from __future__ import annotations

import numpy as np

from .types import (
    AmplitudeSample,
    FixedScatterers,
    NegBinomialScatterers,
    SimConfig,
)

# Phase draws are consumed in fixed-size chunks so memory stays bounded and
# the stream layout is a deterministic function of the config alone.
_PHASES_PER_CHUNK = 4_000_000


def derived_seed(seed: int, range_start: int) -> int:
    """Per-range seed for externally parallelized generation: seed XOR start."""
    return (int(seed) ^ int(range_start)) & (2**64 - 1)


def rayleigh_inverse_cdf(u, sigma: float):
    """Rayleigh quantile function sigma * sqrt(-2 ln(1-u))."""
    u = np.asarray(u, dtype=np.float64)
    return sigma * np.sqrt(-2.0 * np.log1p(-u))


def burr_inverse_cdf(u, alpha: float, c: float, k: float):
    """Burr quantile function alpha * ((1-u)**(-1/k) - 1)**(1/c)."""
    u = np.asarray(u, dtype=np.float64)
    return alpha * ((1.0 - u) ** (-1.0 / k) - 1.0) ** (1.0 / c)


def sample_rayleigh(n: int, sigma: float, seed: int = 0) -> AmplitudeSample:
    """n i.i.d. Rayleigh(sigma) amplitudes via inverse-CDF sampling."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (sigma > 0):
        raise ValueError("sigma must be > 0")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return AmplitudeSample(rayleigh_inverse_cdf(u, sigma))


def sample_k(n: int, alpha: float, seed: int = 0) -> AmplitudeSample:
    """n i.i.d. K(alpha) amplitudes with unit mean square.

    Gamma-mixture construction: the local mean intensity is
    Gamma(alpha, scale 1/alpha), the amplitude conditionally Rayleigh with
    that mean square.  Avoids any Bessel-function inversion.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (alpha > 0):
        raise ValueError("alpha must be > 0")
    rng = np.random.default_rng(seed)
    mean_intensity = rng.gamma(shape=alpha, scale=1.0 / alpha, size=n)
    u = rng.random(n)
    return AmplitudeSample(np.sqrt(-mean_intensity * np.log1p(-u)))


def sample_burr(n: int, alpha: float, c: float, k: float, seed: int = 0) -> AmplitudeSample:
    """n i.i.d. Burr(alpha, c, k) draws via inverse-CDF sampling."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (alpha > 0 and c > 0 and k > 0):
        raise ValueError("burr parameters must be > 0")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return AmplitudeSample(burr_inverse_cdf(u, alpha, c, k))


def _phasor_fixed(rng: np.random.Generator, n_samples: int, n_phasors: int) -> np.ndarray:
    rows_per_chunk = max(1, _PHASES_PER_CHUNK // n_phasors)
    out = np.empty(n_samples, dtype=np.float64)
    for lo in range(0, n_samples, rows_per_chunk):
        hi = min(n_samples, lo + rows_per_chunk)
        phases = rng.uniform(-np.pi, np.pi, size=(hi - lo, n_phasors))
        out[lo:hi] = np.hypot(np.cos(phases).sum(axis=1), np.sin(phases).sum(axis=1))
    return out / np.sqrt(n_phasors)


def _phasor_negbin(
    rng: np.random.Generator, n_samples: int, mean: float, alpha: float
) -> np.ndarray:
    counts = rng.negative_binomial(n=alpha, p=alpha / (alpha + mean), size=n_samples)
    rows_per_chunk = max(1, int(_PHASES_PER_CHUNK // max(1.0, mean)))
    out = np.empty(n_samples, dtype=np.float64)
    for lo in range(0, n_samples, rows_per_chunk):
        hi = min(n_samples, lo + rows_per_chunk)
        m = counts[lo:hi]
        phases = rng.uniform(-np.pi, np.pi, size=int(m.sum()))
        idx = np.repeat(np.arange(hi - lo), m)
        re = np.bincount(idx, weights=np.cos(phases), minlength=hi - lo)
        im = np.bincount(idx, weights=np.sin(phases), minlength=hi - lo)
        out[lo:hi] = np.hypot(re, im)
    return out / np.sqrt(mean)


def sample_phasor_sum(config: SimConfig) -> AmplitudeSample:
    """Amplitudes |sum of M unit phasors| / sqrt(mean M) under `config`.

    With FixedScatterers(N) the empirical law converges to the benchmark
    Rayleigh as N grows; with NegBinomialScatterers(mean, alpha) it tends to
    K(alpha) for large mean.
    """
    rng = np.random.default_rng(config.seed)
    model = config.scatterer_model
    if isinstance(model, FixedScatterers):
        values = _phasor_fixed(rng, config.n_samples, model.n)
    elif isinstance(model, NegBinomialScatterers):
        values = _phasor_negbin(rng, config.n_samples, model.mean, model.alpha)
    else:  # SimConfig validation makes this unreachable
        raise TypeError(f"unknown scatterer model {model!r}")
    return AmplitudeSample(values)
