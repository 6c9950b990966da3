"""Python access to the nemalab spectral core and experiments."""

from ._core import (
    ConfigError,
    SolverBreakdown,
    besov_norm,
    block_masses,
    default_config,
    experiments,
    hybrid_norm,
    partition_of_unity_defect,
    psi,
    run_experiment,
)

__all__ = [
    "ConfigError",
    "SolverBreakdown",
    "besov_norm",
    "block_masses",
    "default_config",
    "experiments",
    "hybrid_norm",
    "partition_of_unity_defect",
    "psi",
    "run_experiment",
]
