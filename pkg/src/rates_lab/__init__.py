"""Numerical laboratory for learning rates of regularized kernel regression
measured in power-space norms."""

from .concentration import (
    BernsteinParams,
    DistributionSpec,
    bernstein_tail_check,
    bernstein_threshold,
    matched_parameters,
    sup_fraction,
)
from .errors import CodeConstructionError, ConfigError, RatesLabError, SolverError
from .estimator import SpectralKernelRidge
from .lower_bound import (
    BinaryCode,
    PackingFamily,
    budget_check,
    build_alternatives,
    gilbert_varshamov,
    kl_divergence,
    lower_bound_value,
    lower_rate_exponent,
    noise_level,
    testing_game,
)
from .power_space import (
    CoefficientVector,
    coefficients_from_csv,
    coefficients_to_csv,
    eval_function,
    linf_bound,
    power_norm,
)
from .rates import (
    CoverageReport,
    ExperimentConfig,
    RateReport,
    besov_translate,
    lambda_schedule,
    oracle_coverage,
    run_sweep,
    sample_dataset,
    synthesize_target,
    table_exponent,
    theoretical_exponent,
    validate_model,
)
from .solver import (
    Dataset,
    DualWeights,
    approximation_error,
    effective_dimension,
    effective_dimension_bound,
    estimation_error,
    extract_coefficients,
    fit,
    oracle_bound,
    population_solution,
    predict,
)
from .spectrum import (
    SpectrumModel,
    basis_matrix,
    decay_fit,
    embedding_constant,
    gram_matrix,
    kernel_eval,
    power_law_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BernsteinParams",
    "BinaryCode",
    "CodeConstructionError",
    "CoefficientVector",
    "ConfigError",
    "CoverageReport",
    "Dataset",
    "DistributionSpec",
    "DualWeights",
    "ExperimentConfig",
    "PackingFamily",
    "RateReport",
    "RatesLabError",
    "SolverError",
    "SpectralKernelRidge",
    "SpectrumModel",
    "approximation_error",
    "basis_matrix",
    "bernstein_tail_check",
    "bernstein_threshold",
    "besov_translate",
    "budget_check",
    "build_alternatives",
    "coefficients_from_csv",
    "coefficients_to_csv",
    "decay_fit",
    "effective_dimension",
    "effective_dimension_bound",
    "embedding_constant",
    "estimation_error",
    "eval_function",
    "extract_coefficients",
    "fit",
    "gilbert_varshamov",
    "gram_matrix",
    "kernel_eval",
    "kl_divergence",
    "lambda_schedule",
    "linf_bound",
    "lower_bound_value",
    "lower_rate_exponent",
    "matched_parameters",
    "noise_level",
    "oracle_bound",
    "oracle_coverage",
    "population_solution",
    "power_law_spectrum",
    "power_norm",
    "predict",
    "run_sweep",
    "sample_dataset",
    "sup_fraction",
    "synthesize_target",
    "table_exponent",
    "testing_game",
    "theoretical_exponent",
    "validate_model",
]
