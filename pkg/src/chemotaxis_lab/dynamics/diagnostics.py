"""Classification of finished trajectories: positivity and blow-up."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import PreconditionError
from ..models.config import Formulation
from .solver import Trajectory, TrajectoryStatus

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.25
MIN_TAIL_SAMPLES = 5
CURVATURE_TOLERANCE = 0.05


@dataclass(frozen=True)
class Violation:
    time: float
    value: float
    location: tuple[float, ...] | None = None  # only known at saved times


@dataclass(frozen=True)
class PositivityReport:
    passed: bool
    min_value: float
    threshold: float
    precondition_met: bool
    violations: list[Violation] = field(default_factory=list)
    note: str = ""


def check_positivity(trajectory: Trajectory, tol: float = 1e-8) -> PositivityReport:
    """Check min u >= -tol * ||u0||_inf at every recorded time.

    Only meaningful for the raw formulation. Initial data with negative
    values is reported as a violation with precondition_met=False and says
    nothing about the evolution.
    """
    if trajectory.formulation is not Formulation.RAW:
        raise PreconditionError("positivity applies to the raw (u) formulation only")
    initial = trajectory.initial
    threshold = -tol * initial.max_abs()
    saved = dict(zip(trajectory.saved_indices.tolist(), trajectory.fields))
    coordinates = trajectory.grid.coordinates()

    violations: list[Violation] = []
    for index in np.flatnonzero(trajectory.minimum < threshold):
        location = None
        if int(index) in saved:
            values = saved[int(index)].values
            where = np.unravel_index(int(np.argmin(values)), values.shape)
            location = tuple(float(axis[where]) for axis in coordinates)
        violations.append(
            Violation(float(trajectory.times[index]), float(trajectory.minimum[index]), location)
        )

    precondition_met = bool(np.min(initial.values) >= 0.0)
    note = "" if precondition_met else "initial data has negative values; no claim is tested"
    if violations:
        logger.info(f"positivity: {len(violations)} recorded times below {threshold:.3g}")
    return PositivityReport(
        passed=precondition_met and not violations,
        min_value=float(np.min(trajectory.minimum)),
        threshold=threshold,
        precondition_met=precondition_met,
        violations=violations,
        note=note,
    )


class BlowupKind(str, Enum):
    GLOBAL = "global"
    BLOWUP = "blowup"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class BlowupStatus:
    kind: BlowupKind
    time: float | None = None


def detect_blowup(trajectory: Trajectory, curvature_tol: float = CURVATURE_TOLERANCE) -> BlowupStatus:
    """Classify a run as global, blown up, or still accelerating at the horizon.

    A run is indeterminate when a quadratic fit of log ||u||_inf over the
    last quarter of the samples ends with positive slope and its curvature
    contributes more than curvature_tol to the log over that tail.
    """
    if trajectory.status is TrajectoryStatus.BLOWUP:
        return BlowupStatus(BlowupKind.BLOWUP, trajectory.halt_time)

    count = trajectory.times.size
    tail = max(MIN_TAIL_SAMPLES, int(count * TAIL_FRACTION))
    if count < MIN_TAIL_SAMPLES:
        return BlowupStatus(BlowupKind.GLOBAL)
    times = trajectory.times[-tail:] - trajectory.times[-tail]
    sup = trajectory.linf[-tail:]
    if np.any(sup <= 0):
        return BlowupStatus(BlowupKind.GLOBAL)

    curvature, slope, _ = np.polyfit(times, np.log(sup), 2)
    span = times[-1]
    end_slope = slope + 2.0 * curvature * span
    if end_slope > 0 and curvature * span**2 > curvature_tol:
        return BlowupStatus(BlowupKind.INDETERMINATE)
    return BlowupStatus(BlowupKind.GLOBAL)
