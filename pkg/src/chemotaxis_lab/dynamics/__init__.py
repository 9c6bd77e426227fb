"""Nonlinear evolution, mild-solution iteration and trajectory diagnostics."""

from .diagnostics import (
    BlowupKind,
    BlowupStatus,
    PositivityReport,
    Violation,
    check_positivity,
    detect_blowup,
)
from .picard import PicardResult, picard_solve
from .solver import (
    ConvergenceReport,
    EtdStepper,
    Trajectory,
    TrajectoryStatus,
    convergence_order,
    evolve,
    flux_divergence,
    mean_drift,
    nonlinear_rhs,
    perturbation_rhs,
    resolve_dt,
    stability_dt_max,
)

__all__ = [
    "BlowupKind",
    "BlowupStatus",
    "PositivityReport",
    "Violation",
    "check_positivity",
    "detect_blowup",
    "PicardResult",
    "picard_solve",
    "ConvergenceReport",
    "EtdStepper",
    "Trajectory",
    "TrajectoryStatus",
    "convergence_order",
    "evolve",
    "flux_divergence",
    "mean_drift",
    "nonlinear_rhs",
    "perturbation_rhs",
    "resolve_dt",
    "stability_dt_max",
]
