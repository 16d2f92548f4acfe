"""Generalized partial Gaussian graphical models.

Joint estimation of the direct predictor-response links and the
conditional response precision by minimizing a convex penalized objective
with a smooth structural prior term, together with simulation scenarios,
evaluation metrics and the full error-bound constant machinery.
"""
import os

# Byte-identical outputs across parallelism degrees require the BLAS layer
# to stay off its threaded code paths; matrices here are small anyway.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")

from ._kernels import BACKEND as kernel_backend  # noqa: E402
from .errors import (  # noqa: E402
    CapacityError,
    GengmError,
    HypothesisError,
    InvalidInputError,
    NumericError,
    SingularGradientError,
    ValidityError,
)
from .evaluate import (  # noqa: E402
    CvGrid,
    SelectionFrequency,
    cross_validate,
    f_score,
    mspe,
    selection_frequency,
)
from .model import (  # noqa: E402
    CovarianceTriplet,
    Dataset,
    ParameterPair,
    RegularizationConfig,
    conditional_mean,
    from_regression,
    population_covariances,
    sample_covariances,
    to_regression,
)
from .objective import SmoothEval, eval_objective, eval_smooth, structural_term  # noqa: E402
from .owlqn import L1Problem, OwlqnResult, OwlqnSettings, pseudo_gradient  # noqa: E402
from .owlqn import minimize as owlqn_minimize  # noqa: E402
from .simulate import (  # noqa: E402
    ScenarioSpec,
    ar_covariance,
    first_diff_structure,
    gen_scenario,
    gen_weather_like,
    split_train_valid,
)
from .solver import FitResult, FitSettings, fit, fit_lasso_baseline  # noqa: E402
from .theory import TheoryInputs, TheoryReport, build_report, check_rip  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapacityError",
    "CovarianceTriplet",
    "CvGrid",
    "Dataset",
    "FitResult",
    "FitSettings",
    "GengmError",
    "HypothesisError",
    "InvalidInputError",
    "L1Problem",
    "NumericError",
    "OwlqnResult",
    "OwlqnSettings",
    "ParameterPair",
    "RegularizationConfig",
    "ScenarioSpec",
    "SelectionFrequency",
    "SingularGradientError",
    "SmoothEval",
    "TheoryInputs",
    "TheoryReport",
    "ValidityError",
    "ar_covariance",
    "build_report",
    "check_rip",
    "conditional_mean",
    "cross_validate",
    "eval_objective",
    "eval_smooth",
    "f_score",
    "first_diff_structure",
    "fit",
    "fit_lasso_baseline",
    "from_regression",
    "gen_scenario",
    "gen_weather_like",
    "kernel_backend",
    "mspe",
    "owlqn_minimize",
    "population_covariances",
    "pseudo_gradient",
    "sample_covariances",
    "selection_frequency",
    "split_train_valid",
    "structural_term",
    "to_regression",
]
