"""Reference special functions, kept deliberately dependency-free.

`bessel_kv_quadrature` evaluates the modified Bessel function of the second
kind from its integral representation

    K_nu(z) = integral_0^inf exp(-z cosh u) cosh(nu u) du,  z > 0,

by adaptive Simpson quadrature.  It is slow and scalar, by design: it serves
as an independent cross-check for the fast vectorized Bessel used in the
K-distribution density, not as a production path.
"""

from __future__ import annotations

import math


def _adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + \
        _adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)


def bessel_kv_quadrature(nu: float, z: float, tol: float = 1e-10) -> float:
    """K_nu(z) for z > 0 by adaptive Simpson on the cosh integral form.

    The upper limit is extended until the integrand falls below 1e-16;
    `tol` is the absolute quadrature tolerance.
    """
    if not (z > 0):
        raise ValueError("bessel_kv_quadrature requires z > 0")
    nu = abs(float(nu))  # K_{-nu} == K_nu

    def integrand(u: float) -> float:
        arg = nu * u - z * math.cosh(u)
        return math.exp(arg) * 0.5 * (1.0 + math.exp(-2.0 * nu * u)) if arg > -745 else 0.0

    u_max = 1.0
    while integrand(u_max) > 1e-16 and u_max < 710.0:
        u_max += 0.5

    fa = integrand(0.0)
    fb = integrand(u_max)
    fm = integrand(0.5 * u_max)
    whole = u_max / 6.0 * (fa + 4.0 * fm + fb)
    return _adaptive_simpson(integrand, 0.0, u_max, fa, fm, fb, whole, tol, depth=48)
