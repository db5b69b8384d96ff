# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the O(n*m) hot loops: KDE and eCF grid evaluation,
plus the per-point log-likelihood sums of the Burr and generalized-gamma fits.

speckledist._kernels._ref holds the NumPy twin of every function here.
Compiled with -ffast-math, so overflow must be headed off before arithmetic:
softplus clamps its exponent range and powexp_sum returns infinity as soon
as one term would overflow.
"""

from libc.math cimport HUGE_VAL, exp, fabs, fmax, log, sqrt, sin, cos

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double SQRT_2PI = sqrt(2.0 * 3.14159265358979323846)

# Gaussian kernel support radius in bandwidths; exp(-0.5 * 10^2) ~ 2e-22,
# far below the backend agreement tolerance.
cdef double KERNEL_RADIUS = 10.0


cdef inline bint _is_uniform(double[::1] grid) noexcept:
    cdef Py_ssize_t m = grid.shape[0]
    if m < 3:
        return True
    cdef double step = (grid[m - 1] - grid[0]) / (m - 1)
    cdef double tol = 1e-9 * (fabs(step) + 1e-300)
    cdef Py_ssize_t j
    for j in range(1, m):
        if fabs((grid[j] - grid[j - 1]) - step) > tol:
            return False
    return True


def kde_gauss(double[::1] data, double[::1] grid, double h):
    """Gaussian-kernel density estimate of `data` at `grid` with bandwidth `h`."""
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t m = grid.shape[0]
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double inv_h = 1.0 / h
    cdef double xi, u, lo_d, hi_d
    cdef Py_ssize_t i, j, j_lo, j_hi
    cdef double g0 = grid[0]
    cdef double step, inv_step, radius

    if m >= 3 and _is_uniform(grid):
        # uniform grid: only the points within the kernel support contribute
        step = (grid[m - 1] - g0) / (m - 1)
        inv_step = 1.0 / step
        radius = KERNEL_RADIUS * h
        for i in range(n):
            xi = data[i]
            lo_d = (xi - radius - g0) * inv_step
            hi_d = (xi + radius - g0) * inv_step
            if lo_d > m - 1 or hi_d < 0.0:
                continue
            j_lo = 0 if lo_d < 0.0 else <Py_ssize_t>lo_d + 1
            j_hi = m - 1 if hi_d > m - 1 else <Py_ssize_t>hi_d
            for j in range(j_lo, j_hi + 1):
                u = (grid[j] - xi) * inv_h
                out[j] += exp(-0.5 * u * u)
    else:
        # data outer / grid inner keeps the accumulator vector in cache
        for i in range(n):
            xi = data[i]
            for j in range(m):
                u = (grid[j] - xi) * inv_h
                out[j] += exp(-0.5 * u * u)

    cdef double norm = 1.0 / (n * h * SQRT_2PI)
    for j in range(m):
        out[j] *= norm
    return out_arr


def ecf(double[::1] data, double[::1] freqs):
    """Empirical characteristic function (1/n) sum exp(i t x) on `freqs`."""
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t m = freqs.shape[0]
    re_arr = np.zeros(m, dtype=np.float64)
    im_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] re = re_arr
    cdef double[::1] im = im_arr
    cdef double tj, acc_re, acc_im
    cdef Py_ssize_t i, j
    # frequency outer / data inner: plain reductions the compiler can widen;
    # cos and sin stay in separate loops because a fused sincos call blocks
    # vectorization (its vector form returns through pointers)
    for j in range(m):
        tj = freqs[j]
        acc_re = 0.0
        for i in range(n):
            acc_re += cos(tj * data[i])
        acc_im = 0.0
        for i in range(n):
            acc_im += sin(tj * data[i])
        re[j] = acc_re
        im[j] = acc_im
    return (re_arr + 1j * im_arr) / n


def powexp_sum(double[::1] logx, double c, double log_scale):
    """Sum of (x / scale)**c given precomputed log(x); inf on overflow."""
    cdef Py_ssize_t n = logx.shape[0]
    cdef double y_max = -HUGE_VAL
    cdef double acc = 0.0
    cdef Py_ssize_t i
    # overflow screen first, so no inf ever enters the fast-math sum
    for i in range(n):
        y_max = fmax(y_max, c * (logx[i] - log_scale))
    if y_max > 705.0:
        return HUGE_VAL
    for i in range(n):
        acc += exp(c * (logx[i] - log_scale))
    return acc


def softplus_sum(double[::1] logx, double c, double log_scale):
    """Sum of log1p((x / scale)**c) given precomputed log(x), overflow-safe.

    Uses the branch-free identity log1p(e^y) = max(y, 0) + log(1 + e^-|y|);
    the exponential argument is never positive, so nothing overflows.
    """
    cdef Py_ssize_t n = logx.shape[0]
    cdef double acc = 0.0
    cdef double y
    cdef Py_ssize_t i
    for i in range(n):
        y = c * (logx[i] - log_scale)
        acc += fmax(y, 0.0) + log(1.0 + exp(-fabs(y)))
    return acc
