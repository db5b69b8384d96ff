"""Maximum-likelihood fitting of seven amplitude-distribution families and a
KDE-referenced goodness-of-fit score.

This is the parametric counter-approach to the benchmark distances: fit a
family, then score it by the mean squared gap between the fitted PDF and
the sample KDE on the shared amplitude grid.  The Rayleigh fit is closed
form; every other family is maximized by Nelder-Mead simplex over
log-transformed parameters, restarted from five moment-informed seeds.

Parameterizations (all parameters strictly positive):

    rayleigh(sigma)                   x/sigma^2 * exp(-x^2 / (2 sigma^2))
    weibull(scale, shape)             (k/s)(x/s)^(k-1) exp(-(x/s)^k)
    gamma(shape, scale)               x^(a-1) exp(-x/b) / (Gamma(a) b^a)
    nakagami(shape >= 0.5, spread)    2 m^m x^(2m-1) exp(-m x^2/w) / (Gamma(m) w^m)
    k_dist(shape, mean_square)        4/Gamma(a) sqrt(a/q) (a x^2/q)^(a/2) K_{a-1}(2 sqrt(a x^2/q))
    generalized_gamma(scale, power, shape)  c x^(cd-1) exp(-(x/a)^c) / (a^(cd) Gamma(d))
    burr(scale, shape_c, shape_k)     (kc/s)(x/s)^(c-1) (1+(x/s)^c)^(-k-1)

The K-distribution fit pins mean_square to the sample mean square (its scale
is already coupled to <A^2>) and maximizes over the shape alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special as sps

from . import _kernels
from .estimators import default_amplitude_grid, kde_eval
from .types import AmplitudeSample, EvalGrid, FitResult, KdeSettings

MAX_ITERATIONS = 2000
_FATOL = 1e-8
_XATOL = 1e-6
_MIN_FIT_SIZE = 10


@dataclass(frozen=True)
class Family:
    """Distribution family descriptor."""

    tag: str
    param_names: tuple[str, ...]

    @property
    def n_params(self) -> int:
        return len(self.param_names)


FAMILY_TAGS = (
    "burr",
    "gamma",
    "generalized_gamma",
    "k_dist",
    "nakagami",
    "rayleigh",
    "weibull",
)

FAMILIES: dict[str, Family] = {
    "burr": Family("burr", ("scale", "shape_c", "shape_k")),
    "gamma": Family("gamma", ("shape", "scale")),
    "generalized_gamma": Family("generalized_gamma", ("scale", "power", "shape")),
    "k_dist": Family("k_dist", ("shape", "mean_square")),
    "nakagami": Family("nakagami", ("shape", "spread")),
    "rayleigh": Family("rayleigh", ("sigma",)),
    "weibull": Family("weibull", ("scale", "shape")),
}


def _family(family) -> Family:
    if isinstance(family, Family):
        return family
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; valid tags: {', '.join(FAMILY_TAGS)}"
        ) from None


def _params_tuple(fam: Family, params) -> tuple[float, ...]:
    if isinstance(params, dict):
        missing = [p for p in fam.param_names if p not in params]
        if missing:
            raise ValueError(f"{fam.tag} is missing parameters {missing}")
        vals = tuple(float(params[p]) for p in fam.param_names)
    else:
        vals = tuple(float(v) for v in np.atleast_1d(params))
        if len(vals) != fam.n_params:
            raise ValueError(
                f"{fam.tag} takes {fam.n_params} parameters {fam.param_names}, got {len(vals)}"
            )
    return vals


def _check_domain(fam: Family, vals: tuple[float, ...]) -> None:
    for name, v in zip(fam.param_names, vals):
        if not (np.isfinite(v) and v > 0):
            raise ValueError(f"{fam.tag} parameter {name} must be positive, got {v!r}")
    if fam.tag == "nakagami" and vals[0] < 0.5:
        raise ValueError(f"nakagami shape must be >= 0.5, got {vals[0]!r}")


# ---------------------------------------------------------------------------
# densities


def _pdf_rayleigh(x, sigma):
    return (x / sigma**2) * np.exp(-(x * x) / (2.0 * sigma**2))


def _pdf_weibull(x, scale, shape):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = x / scale
        return (shape / scale) * z ** (shape - 1.0) * np.exp(-(z**shape))


def _pdf_gamma(x, shape, scale):
    norm = math.exp(-math.lgamma(shape) - shape * math.log(scale))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return norm * x ** (shape - 1.0) * np.exp(-x / scale)


def _pdf_nakagami(x, shape, spread):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ln = (
            math.log(2.0)
            + shape * math.log(shape)
            - math.lgamma(shape)
            - shape * math.log(spread)
        )
        return np.exp(ln) * x ** (2.0 * shape - 1.0) * np.exp(-shape * x * x / spread)


def _pdf_k(x, shape, mean_square):
    x = np.asarray(x, dtype=np.float64)
    z = 2.0 * np.sqrt(shape / mean_square) * x
    out = np.zeros_like(x)
    pos = x > 0
    if np.any(pos):
        zp = z[pos]
        with np.errstate(divide="ignore", over="ignore"):
            ln = (
                math.log(4.0)
                - math.lgamma(shape)
                + 0.5 * (math.log(shape) - math.log(mean_square))
                + (shape / 2.0)
                * (math.log(shape) - math.log(mean_square) + 2.0 * np.log(x[pos]))
                + np.log(sps.kve(shape - 1.0, zp))
                - zp
            )
        out[pos] = np.exp(ln)
    return out


def _pdf_gengamma(x, scale, power, shape):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ln_norm = math.log(power) - power * shape * math.log(scale) - math.lgamma(shape)
        return np.exp(ln_norm) * x ** (power * shape - 1.0) * np.exp(-((x / scale) ** power))


def _pdf_burr(x, scale, shape_c, shape_k):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = x / scale
        return (
            (shape_k * shape_c / scale)
            * z ** (shape_c - 1.0)
            * (1.0 + z**shape_c) ** (-shape_k - 1.0)
        )


_PDFS = {
    "rayleigh": _pdf_rayleigh,
    "weibull": _pdf_weibull,
    "gamma": _pdf_gamma,
    "nakagami": _pdf_nakagami,
    "k_dist": _pdf_k,
    "generalized_gamma": _pdf_gengamma,
    "burr": _pdf_burr,
}


def pdf(family, params, x):
    """Density of `family` at x >= 0; `params` may be a dict or ordered tuple."""
    fam = _family(family)
    vals = _params_tuple(fam, params)
    _check_domain(fam, vals)
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("amplitude densities are defined for x >= 0")
    out = _PDFS[fam.tag](arr, *vals)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# log-likelihoods (x > 0 guaranteed by the zero-dropping in mle_fit)


class _DataCache:
    """Per-sample sums reused across likelihood evaluations and restarts."""

    def __init__(self, x: np.ndarray):
        self.x = np.ascontiguousarray(x, dtype=np.float64)
        self.logx = np.ascontiguousarray(np.log(self.x))
        self.n = x.size
        self.sum_log = float(self.logx.sum())
        self.sum_x = float(self.x.sum())
        self.sum_x2 = float((self.x * self.x).sum())
        self.sum_x4 = float((self.x**4).sum())
        self.mean = self.sum_x / self.n
        self.std = float(np.std(self.x, ddof=1)) if self.n > 1 else 0.0
        self.mean_sq = self.sum_x2 / self.n
        q = np.quantile(self.x, [0.25, 0.5, 0.75])
        self.q25, self.median, self.q75 = (float(v) for v in q)


def _ll_weibull(d: _DataCache, scale, shape):
    s = _kernels.powexp_sum(d.logx, shape, math.log(scale))
    if not np.isfinite(s):
        return -np.inf
    return (
        d.n * (math.log(shape) - shape * math.log(scale))
        + (shape - 1.0) * d.sum_log
        - s
    )


def _ll_gamma(d: _DataCache, shape, scale):
    return (
        (shape - 1.0) * d.sum_log
        - d.sum_x / scale
        - d.n * (math.lgamma(shape) + shape * math.log(scale))
    )


def _ll_nakagami(d: _DataCache, shape, spread):
    return (
        d.n * (math.log(2.0) + shape * math.log(shape) - math.lgamma(shape) - shape * math.log(spread))
        + (2.0 * shape - 1.0) * d.sum_log
        - shape * d.sum_x2 / spread
    )


def _ll_k(d: _DataCache, shape, mean_square):
    z = 2.0 * np.sqrt(shape / mean_square) * d.x
    with np.errstate(divide="ignore", over="ignore"):
        log_bessel = np.log(sps.kve(shape - 1.0, z)) - z
    if not np.all(np.isfinite(log_bessel)):
        return -np.inf
    const = (
        math.log(4.0)
        - math.lgamma(shape)
        + 0.5 * (math.log(shape) - math.log(mean_square))
        + (shape / 2.0) * (math.log(shape) - math.log(mean_square))
    )
    return d.n * const + shape * d.sum_log + float(log_bessel.sum())


def _ll_gengamma(d: _DataCache, scale, power, shape):
    s = _kernels.powexp_sum(d.logx, power, math.log(scale))
    if not np.isfinite(s):
        return -np.inf
    return (
        d.n * (math.log(power) - math.lgamma(shape) - power * shape * math.log(scale))
        + (power * shape - 1.0) * d.sum_log
        - s
    )


def _ll_burr(d: _DataCache, scale, shape_c, shape_k):
    s = _kernels.softplus_sum(d.logx, shape_c, math.log(scale))
    if not np.isfinite(s):
        return -np.inf
    return (
        d.n * (math.log(shape_k) + math.log(shape_c) - shape_c * math.log(scale))
        + (shape_c - 1.0) * d.sum_log
        - (shape_k + 1.0) * s
    )


_LOGLIKS = {
    "weibull": _ll_weibull,
    "gamma": _ll_gamma,
    "nakagami": _ll_nakagami,
    "k_dist": _ll_k,
    "generalized_gamma": _ll_gengamma,
    "burr": _ll_burr,
}


def _ll_rayleigh(d: _DataCache, sigma):
    return d.sum_log - 2.0 * d.n * math.log(sigma) - d.sum_x2 / (2.0 * sigma**2)


# ---------------------------------------------------------------------------
# moment-informed starting points


def _clip(v, lo, hi):
    return float(min(max(v, lo), hi))


def _weibull_base(d: _DataCache) -> tuple[float, float]:
    cv = d.std / d.mean if d.mean > 0 else 1.0
    shape = _clip(cv ** (-1.086) if cv > 0 else 1.0, 0.05, 50.0)
    scale = d.mean / math.gamma(1.0 + 1.0 / shape)
    return _clip(scale, 1e-8, 1e8), shape


def _gamma_base(d: _DataCache) -> tuple[float, float]:
    shape = _clip((d.mean / d.std) ** 2 if d.std > 0 else 1.0, 1e-3, 1e6)
    scale = _clip(d.std**2 / d.mean if d.mean > 0 else 1.0, 1e-8, 1e8)
    return shape, scale


def _starts_weibull(d: _DataCache):
    scale, shape = _weibull_base(d)
    return [
        (scale, shape),
        (scale, 2.0 * shape),
        (scale, 0.5 * shape),
        (2.0 * scale, shape),
        (0.5 * scale, shape),
    ]


def _starts_gamma(d: _DataCache):
    a, b = _gamma_base(d)
    return [(a, b), (2 * a, b / 2), (a / 2, 2 * b), (4 * a, b / 4), (a / 4, 4 * b)]


def _starts_nakagami(d: _DataCache):
    mu2 = d.mean_sq
    var_i = d.sum_x4 / d.n - mu2 * mu2
    m = _clip(mu2 * mu2 / var_i if var_i > 0 else 50.0, 0.501, 100.0)
    excess = m - 0.5
    return [
        (0.5 + excess, mu2),
        (0.5 + 2 * excess, mu2),
        (0.5 + excess / 2, mu2),
        (0.5 + 4 * excess, mu2),
        (0.5 + excess / 4, mu2),
    ]


def _k_shape_start(d: _DataCache) -> float:
    # normalized intensity second moment is 2(1 + 1/alpha) for K(alpha)
    r = (d.sum_x4 / d.n) / d.mean_sq**2
    if r <= 2.0 + 1e-6:
        return 100.0
    return _clip(1.0 / (r / 2.0 - 1.0), 0.05, 1e4)


def _starts_k(d: _DataCache):
    a = _k_shape_start(d)
    return [(a,), (4 * a,), (a / 4,), (16 * a,), (a / 16,)]


def _starts_gengamma(d: _DataCache):
    a_g, b_g = _gamma_base(d)
    s_w, k_w = _weibull_base(d)
    return [
        (b_g, 1.0, a_g),          # gamma-equivalent
        (s_w, k_w, 1.0),          # weibull-equivalent
        (b_g, 2.0, max(a_g / 2, 1e-3)),
        (s_w, 0.7, 2.0),
        (max(d.mean, 1e-8), 1.5, 1.5),
    ]


def _starts_burr(d: _DataCache):
    med = max(d.median, 1e-12)
    if d.q75 > med > 0:
        c0 = _clip(math.log(3.0) / math.log(d.q75 / med), 0.2, 50.0)
    else:
        c0 = 2.0
    # keep each start median-consistent while walking the k ridge
    starts = []
    for k0 in (1.0, 2.0, 0.5, 4.0, 0.25):
        scale = med / (2.0 ** (1.0 / k0) - 1.0) ** (1.0 / c0)
        starts.append((_clip(scale, 1e-8, 1e8), c0, k0))
    return starts


_STARTS = {
    "weibull": _starts_weibull,
    "gamma": _starts_gamma,
    "nakagami": _starts_nakagami,
    "k_dist": _starts_k,
    "generalized_gamma": _starts_gengamma,
    "burr": _starts_burr,
}


# ---------------------------------------------------------------------------
# fitting


def _to_theta(tag: str, vals) -> np.ndarray:
    v = np.asarray(vals, dtype=np.float64)
    if tag == "nakagami":
        return np.array([math.log(v[0] - 0.5), math.log(v[1])])
    return np.log(v)


def _from_theta(tag: str, theta: np.ndarray) -> tuple[float, ...]:
    t = np.asarray(theta, dtype=np.float64)
    if tag == "nakagami":
        return (0.5 + math.exp(t[0]), math.exp(t[1]))
    return tuple(float(v) for v in np.exp(t))


def _simplex_fit(tag: str, d: _DataCache, pinned: tuple[float, ...] = ()):
    """Nelder-Mead over log parameters from each moment-informed start."""
    ll_fn = _LOGLIKS[tag]

    def nll(theta: np.ndarray) -> float:
        params = _from_theta(tag, theta) + pinned
        val = ll_fn(d, *params)
        return -val if np.isfinite(val) else 1e300

    best = None
    total_iters = 0
    for start in _STARTS[tag](d):
        res = optimize.minimize(
            nll,
            _to_theta(tag, start),
            method="Nelder-Mead",
            options={
                "maxiter": MAX_ITERATIONS,
                "fatol": _FATOL,
                "xatol": _XATOL,
            },
        )
        total_iters += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res
    params = _from_theta(tag, best.x) + pinned
    ll = ll_fn(d, *params)
    return params, float(ll), bool(best.success), total_iters


def mle_fit(family, sample: AmplitudeSample) -> FitResult:
    """Maximum-likelihood fit of one family to an amplitude sample.

    Zero amplitudes are dropped before fitting (several log-densities
    diverge at zero); the dropped count is reported on the result.  The
    Rayleigh fit is exact closed form, the K fit pins mean_square to the
    sample mean square, all others run the restarted simplex search.
    """
    fam = _family(family)
    x = sample.values
    n_zeros = int(np.count_nonzero(x == 0.0))
    if n_zeros:
        x = x[x > 0.0]
    if x.size == 0:
        raise ValueError("mle_fit needs positive values")

    if fam.tag == "rayleigh":
        # exact closed form, valid for any sample size
        d = _DataCache(x)
        sigma = math.sqrt(d.sum_x2 / (2.0 * d.n))
        return FitResult(
            family="rayleigh",
            params={"sigma": sigma},
            log_likelihood=_ll_rayleigh(d, sigma),
            converged=True,
            iterations=0,
            n_zeros_dropped=n_zeros,
        )

    if x.size < _MIN_FIT_SIZE:
        raise ValueError(f"mle_fit needs at least {_MIN_FIT_SIZE} positive values")
    d = _DataCache(x)
    if d.std == 0.0:
        raise ValueError("degenerate sample: zero variance")

    pinned = (d.mean_sq,) if fam.tag == "k_dist" else ()
    params, ll, ok, iters = _simplex_fit(fam.tag, d, pinned)
    return FitResult(
        family=fam.tag,
        params=dict(zip(fam.param_names, params)),
        log_likelihood=ll,
        converged=ok,
        iterations=iters,
        n_zeros_dropped=n_zeros,
    )


def bayes_sigma(sample: AmplitudeSample) -> float:
    """Bayes estimator of the Rayleigh scale.

    sqrt(2)/2 * Gamma(n+2)/Gamma(n+5/2) * sqrt(sum of squares), evaluated
    with log-gamma so large n cannot overflow; for an RMS-normalized sample
    this approaches sqrt(2)/2 as n grows.
    """
    x = sample.values
    n = x.size
    log_ratio = math.lgamma(n + 2.0) - math.lgamma(n + 2.5)
    return (math.sqrt(2.0) / 2.0) * math.exp(log_ratio) * math.sqrt(float((x * x).sum()))


# ---------------------------------------------------------------------------
# goodness of fit


def _gof_against_kde(fit: FitResult, abscissae: np.ndarray, kde_values: np.ndarray) -> float:
    fitted = pdf(fit.family, fit.params, abscissae)
    gap = fitted - kde_values
    return float(np.mean(gap * gap))


def gof_mse(
    fit: FitResult,
    sample: AmplitudeSample,
    grid: EvalGrid | None = None,
    kde_settings: KdeSettings | None = None,
) -> float:
    """Mean squared gap between the fitted PDF and the sample KDE on the
    post-cutoff grid; stores the value on `fit.gof` and returns it."""
    if not fit.converged:
        raise ValueError("goodness of fit is undefined for an unconverged fit")
    x, dens = kde_eval(sample, grid, kde_settings)
    fit.gof = _gof_against_kde(fit, x, dens)
    return fit.gof


def rank_families(
    sample: AmplitudeSample,
    families=None,
    grid: EvalGrid | None = None,
    kde_settings: KdeSettings | None = None,
) -> list[FitResult]:
    """Fit the requested families (default: all seven) and sort ascending by
    goodness of fit; ties break toward fewer parameters, then tag order.
    Unconverged fits sort last with gof left unset."""
    tags = [_family(f).tag for f in (families or FAMILY_TAGS)]
    kde_settings = kde_settings or KdeSettings()
    if grid is None:
        grid = default_amplitude_grid(sample, kde_settings)
    x, dens = kde_eval(sample, grid, kde_settings)

    results = []
    for tag in tags:
        fit = mle_fit(tag, sample)
        if fit.converged:
            fit.gof = _gof_against_kde(fit, x, dens)
        results.append(fit)

    def key(fit: FitResult):
        unranked = fit.gof is None
        return (
            1 if unranked else 0,
            fit.gof if not unranked else 0.0,
            FAMILIES[fit.family].n_params,
            FAMILY_TAGS.index(fit.family),
        )

    return sorted(results, key=key)
