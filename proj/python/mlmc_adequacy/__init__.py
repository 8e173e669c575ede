"""Multilevel Monte Carlo adequacy assessment."""

from ._core import (
    ConfigError,
    Copt,
    DataError,
    EstimateError,
    RngStream,
    __version__,
    check_results,
    copt_convolve,
    default_data_dir,
    estimate_format,
    optimal_allocation,
    run_experiment,
    solve_lp,
    speed_metric,
    validate_config,
)

__all__ = [
    "ConfigError",
    "Copt",
    "DataError",
    "EstimateError",
    "RngStream",
    "__version__",
    "check_results",
    "copt_convolve",
    "default_data_dir",
    "estimate_format",
    "optimal_allocation",
    "run_experiment",
    "solve_lp",
    "speed_metric",
    "validate_config",
]
