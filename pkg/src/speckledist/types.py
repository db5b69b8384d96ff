"""Core domain types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

RMS_TOLERANCE = 1e-12


def _as_amplitude_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("amplitude values must be one-dimensional")
    if arr.size == 0:
        raise ValueError("amplitude sample is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitude values must be finite")
    if np.any(arr < 0):
        raise ValueError("amplitude values must be nonnegative")
    return arr


@dataclass(frozen=True)
class AmplitudeSample:
    """One-dimensional sample of nonnegative speckle amplitudes.

    ``normalized=True`` asserts the sample has unit root mean square
    (checked on construction to within 1e-12 relative).
    """

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = _as_amplitude_array(self.values)
        object.__setattr__(self, "values", arr)
        if self.normalized:
            rms = float(np.sqrt(np.mean(arr * arr)))
            if abs(rms - 1.0) > RMS_TOLERANCE:
                raise ValueError(
                    f"sample flagged normalized but RMS = {rms!r} differs from 1"
                )

    @property
    def n(self) -> int:
        return int(self.values.size)

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values * self.values)))


@dataclass(frozen=True)
class RoiSpec:
    """Rectangular pixel region: origin (x0, y0), extent width x height."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        for name in ("x0", "y0", "width", "height"):
            v = getattr(self, name)
            if int(v) != v:
                raise ValueError(f"ROI field {name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("ROI origin must be nonnegative")
        if self.width < 1 or self.height < 1:
            raise ValueError("ROI extent must be at least 1x1")

    @property
    def area(self) -> int:
        return self.width * self.height

    @classmethod
    def parse(cls, text: str) -> "RoiSpec":
        """Parse 'x0,y0,width,height' (also accepts ':' separators)."""
        parts = text.replace(":", ",").split(",")
        if len(parts) != 4:
            raise ValueError(f"ROI must have four fields x0,y0,width,height: {text!r}")
        try:
            x0, y0, w, h = (int(p.strip()) for p in parts)
        except ValueError as exc:
            raise ValueError(f"ROI fields must be integers: {text!r}") from exc
        return cls(x0, y0, w, h)

    def __str__(self) -> str:
        return f"{self.x0},{self.y0},{self.width},{self.height}"


@dataclass(frozen=True)
class PixelMatrix:
    """Nonnegative pixel values (row-major) plus the declared bit-depth maximum."""

    values: np.ndarray
    depth: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("pixel matrix must be two-dimensional")
        if arr.size == 0:
            raise ValueError("pixel matrix is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("pixel values must be finite")
        if np.any(arr < 0):
            raise ValueError("pixel values must be nonnegative")
        object.__setattr__(self, "values", arr)
        if not (self.depth > 0):
            raise ValueError("bit-depth maximum must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # (rows, cols)


@dataclass(frozen=True)
class FixedScatterers:
    """Deterministic scatterer count per resolution cell."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("fixed scatterer count must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))

    @property
    def mean(self) -> float:
        return float(self.n)


@dataclass(frozen=True)
class NegBinomialScatterers:
    """Negative-binomial scatterer count, parameterized by mean and shape alpha.

    Variance is mean + mean**2 / alpha, so small alpha means strong
    number fluctuations and a heavier-tailed amplitude law.
    """

    mean: float
    alpha: float

    def __post_init__(self):
        if not (self.mean > 0):
            raise ValueError("negative-binomial mean must be > 0")
        if not (self.alpha > 0):
            raise ValueError("negative-binomial shape alpha must be > 0")


ScattererModel = Union[FixedScatterers, NegBinomialScatterers]

_SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo run configuration; (config, seed) fully determines the output."""

    n_samples: int
    scatterer_model: ScattererModel
    seed: int = 0

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError("n_samples must be an integer >= 1")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if not isinstance(self.scatterer_model, (FixedScatterers, NegBinomialScatterers)):
            raise TypeError("scatterer_model must be FixedScatterers or NegBinomialScatterers")
        if int(self.seed) != self.seed or not (0 <= self.seed <= _SEED_MAX):
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class EvalGrid:
    """Strictly increasing evaluation abscissae, tagged amplitude or frequency."""

    points: np.ndarray
    domain_tag: str = "amplitude"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("grid must be a nonempty 1-D array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if self.domain_tag not in ("amplitude", "frequency"):
            raise ValueError(f"unknown grid domain tag {self.domain_tag!r}")
        if self.domain_tag == "amplitude" and pts[0] < 0:
            raise ValueError("amplitude grids must start at >= 0")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return int(self.points.size)


@dataclass(frozen=True)
class KdeSettings:
    """Kernel density estimate settings.

    ``bandwidth=None`` selects the automatic rule h = (0.75 n)**(-1/5) * s
    with s the (n-1)-divisor sample standard deviation.  Grid points below
    ``boundary_cutoff`` are excluded from KDE output (left-boundary
    correction for nonnegative data).
    """

    bandwidth: float | None = None
    boundary_cutoff: float = 0.05

    def __post_init__(self):
        if self.bandwidth is not None and not (self.bandwidth > 0):
            raise ValueError("fixed bandwidth must be > 0")
        if self.boundary_cutoff < 0:
            raise ValueError("boundary cutoff must be >= 0")


@dataclass(frozen=True)
class DistanceReport:
    """The four benchmark distances for one sample, plus evaluation metadata."""

    d_ks: float
    d_mse: float
    d_mmd: float
    d_cr: float
    n: int
    grid_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d_ks": self.d_ks,
            "d_mse": self.d_mse,
            "d_mmd": self.d_mmd,
            "d_cr": self.d_cr,
            "n": self.n,
            "settings": dict(self.grid_meta),
        }


@dataclass
class FitResult:
    """Outcome of one maximum-likelihood fit.

    ``gof`` is filled in by the KDE-referenced goodness-of-fit evaluation;
    ``iterations`` counts optimizer iterations summed over restarts.
    """

    family: str
    params: dict[str, float]
    log_likelihood: float
    converged: bool
    iterations: int
    gof: float | None = None
    n_zeros_dropped: int = 0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": {k: float(v) for k, v in self.params.items()},
            "log_likelihood": self.log_likelihood,
            "gof": self.gof,
            "converged": self.converged,
            "iterations": self.iterations,
            "n_zeros_dropped": self.n_zeros_dropped,
        }
