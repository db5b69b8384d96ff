"""The four distribution-model-free distances to the Rayleigh benchmark.

All four compare an RMS-normalized amplitude sample against the fixed
benchmark: sup gap of CDFs (d_ks), mean squared density gap on a shared
amplitude grid (d_mse), RMS characteristic-function modulus gap on a shared
frequency grid (d_mmd), and the signed contrast-ratio offset (d_cr).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .benchmark import CR_RAYLEIGH, bd_cdf, bd_cf_grid, bd_pdf
from .estimators import (
    automatic_bandwidth,
    contrast_ratio,
    default_amplitude_grid,
    default_frequency_grid,
    ecf_eval,
    kde_eval,
)
from .types import AmplitudeSample, DistanceReport, EvalGrid, KdeSettings


def _require_normalized(sample: AmplitudeSample, op: str) -> None:
    if not sample.normalized:
        raise ValueError(f"{op} requires an RMS-normalized sample; call normalize_rms first")


def ks_statistic(values) -> float:
    """One-sample KS statistic of raw values against the benchmark CDF.

    Evaluated exactly at the order statistics, taking both one-sided gaps at
    every jump of the empirical CDF.  This is the bare statistic; `d_ks` is
    the pipeline entry that insists on a normalized sample.
    """
    x = np.sort(np.asarray(values, dtype=np.float64))
    if x.size == 0:
        raise ValueError("KS statistic of an empty sample")
    n = x.size
    cdf = bd_cdf(x)
    steps = np.arange(1, n + 1) / n
    upper = float(np.max(steps - cdf))
    lower = float(np.max(cdf - (steps - 1.0 / n)))
    return max(upper, lower)


def d_ks(sample: AmplitudeSample) -> float:
    """One-sample Kolmogorov-Smirnov distance to the benchmark CDF."""
    _require_normalized(sample, "d_ks")
    return ks_statistic(sample.values)


def mse_gap(density: np.ndarray, abscissae: np.ndarray) -> float:
    """Mean squared gap between a density evaluated on `abscissae` and the
    benchmark PDF there.  The KDE-independent half of d_mse."""
    density = np.asarray(density, dtype=np.float64)
    abscissae = np.asarray(abscissae, dtype=np.float64)
    if density.size == 0 or density.shape != abscissae.shape:
        raise ValueError("density and abscissae must be matching nonempty arrays")
    gap = density - bd_pdf(abscissae)
    return float(np.mean(gap * gap))


def d_mse(
    sample: AmplitudeSample,
    grid: EvalGrid | None = None,
    kde_settings: KdeSettings | None = None,
) -> float:
    """Mean squared KDE-to-benchmark density gap over the post-cutoff grid."""
    _require_normalized(sample, "d_mse")
    x, density = kde_eval(sample, grid, kde_settings)
    return mse_gap(density, x)


def mmd_gap(cf_values: np.ndarray, freqs: np.ndarray) -> float:
    """RMS modulus gap between characteristic-function values on `freqs` and
    the benchmark CF there.  The eCF-independent half of d_mmd."""
    cf_values = np.asarray(cf_values, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.float64)
    if cf_values.size == 0 or cf_values.shape != freqs.shape:
        raise ValueError("cf values and freqs must be matching nonempty arrays")
    gap = cf_values - bd_cf_grid(freqs)
    return float(np.sqrt(np.mean(gap.real**2 + gap.imag**2)))


def d_mmd(sample: AmplitudeSample, freq_grid: EvalGrid | None = None) -> float:
    """RMS gap between the empirical and benchmark characteristic functions.

    The t=0 grid point contributes exactly zero (both functions equal 1), so
    grids may include it freely.
    """
    _require_normalized(sample, "d_mmd")
    freqs, values = ecf_eval(sample, freq_grid or default_frequency_grid())
    return mmd_gap(values, freqs)


def d_cr(sample: AmplitudeSample) -> float:
    """Signed contrast-ratio offset CR(sample) - sqrt(4/pi - 1).

    Kept signed: sub-Rayleigh speckle sits below zero, scatterer-number
    fluctuations push it above.  Take abs() for a magnitude.
    """
    return contrast_ratio(sample) - CR_RAYLEIGH


def distance_report(
    sample: AmplitudeSample,
    grid: EvalGrid | None = None,
    freq_grid: EvalGrid | None = None,
    kde_settings: KdeSettings | None = None,
) -> DistanceReport:
    """All four distances with shared grids, plus the settings that produced them."""
    _require_normalized(sample, "distance_report")
    if sample.n < 2:
        raise ValueError("distance_report needs at least two samples")
    kde_settings = kde_settings or KdeSettings()
    grid = grid or default_amplitude_grid(sample, kde_settings)
    freq_grid = freq_grid or default_frequency_grid()

    bandwidth = (
        kde_settings.bandwidth
        if kde_settings.bandwidth is not None
        else automatic_bandwidth(sample.values)
    )
    meta = {
        "grid_n": grid.size,
        "grid_lo": float(grid.points[0]),
        "grid_hi": float(grid.points[-1]),
        "cutoff": kde_settings.boundary_cutoff,
        "bandwidth": bandwidth,
        "freq_n": freq_grid.size,
        "freq_max": float(freq_grid.points[-1]),
        "backend": _kernels.BACKEND,
    }
    return DistanceReport(
        d_ks=d_ks(sample),
        d_mse=d_mse(sample, grid, kde_settings),
        d_mmd=d_mmd(sample, freq_grid),
        d_cr=d_cr(sample),
        n=sample.n,
        grid_meta=meta,
    )
