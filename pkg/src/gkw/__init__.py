"""Generalized Kumaraswamy distributions: exact densities, series
expansions for moments and related quantities, maximum-likelihood
estimation, and a small command-line interface.
"""

from .core import (
    Params,
    SubModel,
    SUBMODELS,
    pdf,
    log_pdf,
    cdf,
    quantile,
    sample,
)
from .estim import (
    Dataset,
    FitOptions,
    FitResult,
    LrTestResult,
    fit,
    fit_family,
    log_likelihood,
    lr_test,
    score,
    observed_info,
    std_errors,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "SubModel",
    "SUBMODELS",
    "pdf",
    "log_pdf",
    "cdf",
    "quantile",
    "sample",
    "Dataset",
    "FitOptions",
    "FitResult",
    "LrTestResult",
    "fit",
    "fit_family",
    "log_likelihood",
    "lr_test",
    "score",
    "observed_info",
    "std_errors",
    "__version__",
]
