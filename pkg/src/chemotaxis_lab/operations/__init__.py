"""Experiment operations: initial data, runners, artifacts, orchestration."""

from .artifacts import SeriesArtifact, read_series, write_report, write_series

# experiments first: delta_sweep imports experiments.base and is registered there
from .experiments import EXPERIMENT_RUNNERS, ExperimentContext, ExperimentOutcome
from .delta_sweep import run_delta_sweep
from .initial_data import build_grid, build_initial_field, grid_for, named_rng
from .orchestrator import ExperimentOrchestrator

__all__ = [
    "EXPERIMENT_RUNNERS",
    "ExperimentContext",
    "ExperimentOrchestrator",
    "ExperimentOutcome",
    "SeriesArtifact",
    "build_grid",
    "build_initial_field",
    "grid_for",
    "named_rng",
    "read_series",
    "run_delta_sweep",
    "write_report",
    "write_series",
]
