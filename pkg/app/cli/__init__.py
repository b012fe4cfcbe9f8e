# app/cli/__init__.py
#
# CLI Module - experiment configuration and run orchestration.
#

from .experiment_config import (
    DataConfig,
    ExperimentConfig,
    apply_settings,
    expand_grid,
    load_experiment_config,
    load_grid,
)
from .runner import RunResult, build_source, run_experiment, run_oracle, run_single, sweep

__all__ = [
    "DataConfig",
    "ExperimentConfig",
    "apply_settings",
    "expand_grid",
    "load_experiment_config",
    "load_grid",
    "RunResult",
    "build_source",
    "run_experiment",
    "run_oracle",
    "run_single",
    "sweep",
]
