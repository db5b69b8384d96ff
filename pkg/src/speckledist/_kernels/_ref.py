"""Pure-NumPy kernels: the fallback backend when the compiled core is absent.

Each function mirrors one hot loop in speckledist._kernels._core; signatures
and results (up to float rounding in the summation order) are identical.
Evaluation is chunked over the data axis to bound temporary memory.
"""

from __future__ import annotations

import numpy as np

_CHUNK_ELEMENTS = 4_000_000  # cap on chunk_rows * grid_size temporaries

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def _chunks(n: int, m: int):
    step = max(1, _CHUNK_ELEMENTS // max(1, m))
    for lo in range(0, n, step):
        yield lo, min(n, lo + step)


def kde_gauss(data: np.ndarray, grid: np.ndarray, h: float) -> np.ndarray:
    """Gaussian-kernel density estimate of `data` at `grid` with bandwidth `h`."""
    data = np.ascontiguousarray(data, dtype=np.float64)
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    n, m = data.size, grid.size
    acc = np.zeros(m, dtype=np.float64)
    inv_h = 1.0 / h
    for lo, hi in _chunks(n, m):
        with np.errstate(over="ignore"):  # far-away points: exp(-inf) -> 0
            u = (grid[None, :] - data[lo:hi, None]) * inv_h
            np.multiply(u, u, out=u)
            u *= -0.5
            np.exp(u, out=u)
        acc += u.sum(axis=0)
    acc /= n * h * _SQRT_2PI
    return acc


def ecf(data: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Empirical characteristic function (1/n) sum exp(i t x) on `freqs`."""
    data = np.ascontiguousarray(data, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    n, m = data.size, freqs.size
    re = np.zeros(m, dtype=np.float64)
    im = np.zeros(m, dtype=np.float64)
    for lo, hi in _chunks(n, m):
        tx = data[lo:hi, None] * freqs[None, :]
        re += np.cos(tx).sum(axis=0)
        im += np.sin(tx).sum(axis=0)
    return (re + 1j * im) / n


def powexp_sum(logx: np.ndarray, c: float, log_scale: float) -> float:
    """Sum of (x / scale)**c given precomputed log(x); may overflow to inf."""
    logx = np.asarray(logx, dtype=np.float64)
    with np.errstate(over="ignore"):
        return float(np.exp(c * (logx - log_scale)).sum())


def softplus_sum(logx: np.ndarray, c: float, log_scale: float) -> float:
    """Sum of log1p((x / scale)**c) given precomputed log(x), overflow-safe."""
    logx = np.asarray(logx, dtype=np.float64)
    y = c * (logx - log_scale)
    out = np.empty_like(y)
    hi = y > 33.0
    lo = y < -33.0
    mid = ~(hi | lo)
    out[hi] = y[hi]
    out[lo] = np.exp(y[lo])
    out[mid] = np.log1p(np.exp(y[mid]))
    return float(out.sum())
