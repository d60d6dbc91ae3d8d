"""Experiment drivers, data export and the command-line interface."""

from .experiments import (
    ConfigError,
    ErrorSeries,
    ExperimentConfig,
    fit_slope,
    run_convergence,
    run_evolution,
    run_map_test,
)

__all__ = [
    "ConfigError",
    "ErrorSeries",
    "ExperimentConfig",
    "fit_slope",
    "run_convergence",
    "run_evolution",
    "run_map_test",
]
