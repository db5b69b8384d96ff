"""Distribution-model-free speckle statistics toolkit.

Measures how far an RMS-normalized speckle amplitude sample sits from the
fixed Rayleigh benchmark via four statistical distances (CDF sup gap, KDE
density MSE, characteristic-function RMS gap, contrast-ratio offset), and
contrasts that against classical maximum-likelihood distribution fitting.
A Monte-Carlo phasor-sum simulator provides ground truth throughout.
"""

from ._kernels import BACKEND
from ._version import __version__
from .benchmark import CR_RAYLEIGH, RAYLEIGH_SIGMA, bd_cdf, bd_cf, bd_cf_grid, bd_pdf
from .distances import (
    d_cr,
    d_ks,
    d_mmd,
    d_mse,
    distance_report,
    ks_statistic,
    mmd_gap,
    mse_gap,
)
from .distfit import (
    FAMILIES,
    FAMILY_TAGS,
    Family,
    bayes_sigma,
    gof_mse,
    mle_fit,
    pdf,
    rank_families,
)
from .errors import DataError, SpeckledistError, UsageError
from .estimators import (
    automatic_bandwidth,
    contrast_ratio,
    default_amplitude_grid,
    default_frequency_grid,
    ecdf_eval,
    ecf_eval,
    kde_eval,
)
from .ingest import extract_roi, inverse_log_transform, load_image, normalize_rms
from .simulate import (
    derived_seed,
    sample_burr,
    sample_k,
    sample_phasor_sum,
    sample_rayleigh,
)
from .stats import (
    PairedSeries,
    fisher_compare,
    linear_regression,
    norm_cdf,
    pearson_r,
    spearman_rho,
)
from .types import (
    AmplitudeSample,
    DistanceReport,
    EvalGrid,
    FitResult,
    FixedScatterers,
    KdeSettings,
    NegBinomialScatterers,
    PixelMatrix,
    RoiSpec,
    SimConfig,
)

__all__ = [
    "AmplitudeSample",
    "BACKEND",
    "CR_RAYLEIGH",
    "DataError",
    "DistanceReport",
    "EvalGrid",
    "FAMILIES",
    "FAMILY_TAGS",
    "Family",
    "FitResult",
    "FixedScatterers",
    "KdeSettings",
    "NegBinomialScatterers",
    "PairedSeries",
    "PixelMatrix",
    "RAYLEIGH_SIGMA",
    "RoiSpec",
    "SimConfig",
    "SpeckledistError",
    "UsageError",
    "__version__",
    "automatic_bandwidth",
    "bayes_sigma",
    "bd_cdf",
    "bd_cf",
    "bd_cf_grid",
    "bd_pdf",
    "contrast_ratio",
    "d_cr",
    "d_ks",
    "d_mmd",
    "d_mse",
    "default_amplitude_grid",
    "default_frequency_grid",
    "derived_seed",
    "distance_report",
    "ecdf_eval",
    "ecf_eval",
    "extract_roi",
    "fisher_compare",
    "gof_mse",
    "inverse_log_transform",
    "kde_eval",
    "ks_statistic",
    "linear_regression",
    "load_image",
    "mle_fit",
    "mmd_gap",
    "mse_gap",
    "norm_cdf",
    "normalize_rms",
    "pdf",
    "pearson_r",
    "rank_families",
    "sample_burr",
    "sample_k",
    "sample_phasor_sum",
    "sample_rayleigh",
    "spearman_rho",
]
