"""Experiment runners keyed by experiment kind."""

from ...models.config import ExperimentKind
from .base import ExperimentContext, ExperimentOutcome, Runner, plain
from .linear import run_decay, run_dispersion, run_operator_suite
from .nonlinear import (
    run_consistency,
    run_convergence,
    run_evolve,
    run_growth,
    run_positivity,
    run_stability,
)
from .verification import run_norms_suite, run_picard
from ..delta_sweep import run_delta_sweep

EXPERIMENT_RUNNERS: dict[ExperimentKind, Runner] = {
    ExperimentKind.DISPERSION: run_dispersion,
    ExperimentKind.OPERATOR_SUITE: run_operator_suite,
    ExperimentKind.DECAY: run_decay,
    ExperimentKind.GROWTH: run_growth,
    ExperimentKind.DELTA_SWEEP: run_delta_sweep,
    ExperimentKind.STABILITY: run_stability,
    ExperimentKind.EVOLVE: run_evolve,
    ExperimentKind.PICARD: run_picard,
    ExperimentKind.POSITIVITY: run_positivity,
    ExperimentKind.CONSISTENCY: run_consistency,
    ExperimentKind.CONVERGENCE: run_convergence,
    ExperimentKind.NORMS_SUITE: run_norms_suite,
}

__all__ = [
    "EXPERIMENT_RUNNERS",
    "ExperimentContext",
    "ExperimentOutcome",
    "Runner",
    "plain",
]
