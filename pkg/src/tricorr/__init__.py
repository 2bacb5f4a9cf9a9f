"""Triple correlation sums of Hecke eigenform coefficients.

Exact integer coefficient generators for the level-1 eigenforms of weight
12 through 26, smoothed and sharp correlation sums sum a(h) b(m) c(2m-h)
with rigorous error accounting, a truncated double Dirichlet series with
tail bounds, a Mellin inversion consistency check, and growth/exponent
analysis utilities.  The `tricorr` console script fronts all of it.
"""

__version__ = "0.1.0"

from .dyadic import Dyadic
from .errors import CoverageError, IngestError, RegionError
from .forms import (
    EIGENFORM_WEIGHTS,
    HeckeEigenform,
    ThetaSeries,
    cached_eigenform,
    export_csv,
    gen_level1_eigenform,
    gen_theta,
    ingest_coefficients,
    verify_form,
    zeroed_variant,
)
from .corrsum import (
    SmoothingKernel,
    TripleSumResult,
    omega_sum,
    triple_sum_direct,
    triple_sum_fft,
)
from .dseries import (
    CheckReport,
    DirichletEval,
    DirichletPoint,
    eval_D,
    eval_D_theta,
    mellin_inversion_check,
)
from .analysis import (
    APTriple,
    CongruentHit,
    ExponentFit,
    NonvanishingReport,
    OmegaGrowthReport,
    TheoremBoundParams,
    benchmark_slopes,
    comparison_bounds,
    congruent_search,
    fit_exponent,
    nonvanishing_scan,
    omega_growth_report,
    scan_grid,
    theorem_bound,
)

__all__ = [
    "__version__",
    "Dyadic",
    "CoverageError",
    "IngestError",
    "RegionError",
    "EIGENFORM_WEIGHTS",
    "HeckeEigenform",
    "ThetaSeries",
    "cached_eigenform",
    "export_csv",
    "gen_level1_eigenform",
    "gen_theta",
    "ingest_coefficients",
    "verify_form",
    "zeroed_variant",
    "SmoothingKernel",
    "TripleSumResult",
    "omega_sum",
    "triple_sum_direct",
    "triple_sum_fft",
    "CheckReport",
    "DirichletEval",
    "DirichletPoint",
    "eval_D",
    "eval_D_theta",
    "mellin_inversion_check",
    "APTriple",
    "CongruentHit",
    "ExponentFit",
    "NonvanishingReport",
    "OmegaGrowthReport",
    "TheoremBoundParams",
    "benchmark_slopes",
    "comparison_bounds",
    "congruent_search",
    "fit_exponent",
    "nonvanishing_scan",
    "omega_growth_report",
    "scan_grid",
    "theorem_bound",
]
