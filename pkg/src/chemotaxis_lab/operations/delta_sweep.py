"""Time for a perturbation of size delta to reach a fixed amplitude.

Above the threshold the time grows like ln(1/delta) / a: fitting t_delta
against ln(1/delta) measures the instability rate while the terminal
amplitude stays the same for every delta. Below the threshold no delta
reaches the target.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import stats

from ..analysis.norms import lp_norm
from ..analysis.semigroup import build_near_eigenmode, spectral_abscissa, wave_packet
from ..dynamics.solver import TrajectoryStatus, evolve
from ..errors import PreconditionError
from ..models.config import PacketData, StopNorm
from ..spectral.grid import RealField
from .artifacts import SeriesArtifact
from .experiments.base import ExperimentContext, ExperimentOutcome, flag, within

logger = logging.getLogger(__name__)


def _packet(ctx: ExperimentContext, delta: float, k: float | None) -> RealField:
    descriptor = ctx.config.initial
    width = descriptor.width if isinstance(descriptor, PacketData) else 20.0
    center = descriptor.center if isinstance(descriptor, PacketData) else 0.0
    if k is None:
        return build_near_eigenmode(ctx.config.A, 1.0, width, ctx.grid, center, l2_norm=delta)
    packet = wave_packet(ctx.grid, k, width, 1.0, center)
    return (delta / lp_norm(packet, 2.0)) * packet


def run_delta_sweep(ctx: ExperimentContext) -> ExperimentOutcome:
    """Sweep the L2 size of a packet and record when it reaches the target amplitude."""
    cfg = ctx.config
    params = cfg.sweep
    if not params.deltas or any(d <= 0 for d in params.deltas):
        raise PreconditionError("delta sweep needs a non-empty list of positive sizes")
    deltas = sorted(params.deltas, reverse=True)
    if any(d >= params.target for d in deltas):
        raise PreconditionError(f"every delta must lie below the target {params.target:g}")

    unstable = cfg.A > 1.0
    k = None
    if not unstable:
        descriptor = cfg.initial
        k = descriptor.k if isinstance(descriptor, PacketData) and descriptor.k else params.control_wavenumber
    solver = cfg.solver_for(stop_amplitude=params.target, stop_norm=StopNorm.L2)

    outcome = ExperimentOutcome()
    reached: list[tuple[float, float]] = []
    terminal: list[float] = []
    for i, delta in enumerate(deltas):
        trajectory = evolve(_packet(ctx, delta, k), solver)
        outcome.series.append(
            SeriesArtifact.from_trajectory(
                trajectory, filename="series.csv" if i == 0 else f"series_delta_{i}.csv"
            )
        )
        terminal.append(float(trajectory.l2[-1]))
        if trajectory.status is TrajectoryStatus.STOPPED:
            reached.append((delta, float(trajectory.halt_time)))
            ctx.log(f"delta={delta:g} reached {params.target:g} at t={trajectory.halt_time:g}", "INFO")
        elif trajectory.status is TrajectoryStatus.BLOWUP:
            outcome.notes.append(f"delta={delta:g} excluded: {trajectory.message}")
        else:
            outcome.notes.append(f"delta={delta:g} did not reach {params.target:g} by the horizon")

    outcome.measured["deltas"] = deltas
    outcome.measured["terminal_l2"] = terminal
    outcome.measured["t_delta"] = {f"{d:g}": t for d, t in reached}

    if not unstable:
        outcome.add(
            flag(
                "no_delta_reaches_target",
                not reached,
                detail=f"A={cfg.A:g} at or below the threshold, wavenumber {k:g}",
            )
        )
        return outcome

    outcome.add(flag("all_deltas_reach_target", len(reached) == len(deltas)))
    abscissa = spectral_abscissa(cfg.A)
    outcome.reference["rate"] = abscissa
    if len(reached) < 2:
        outcome.add(flag("sweep_rate", False, detail="fewer than two sizes reached the target"))
        return outcome
    logs = np.log([1.0 / d for d, _ in reached])
    times = np.array([t for _, t in reached])
    fit = stats.linregress(logs, times)
    rate = 1.0 / fit.slope if fit.slope > 0 else math.inf
    outcome.measured["rate"] = rate
    outcome.measured["intercept"] = float(fit.intercept)
    outcome.add(within("sweep_rate", rate, abscissa, params.tolerance))
    return outcome
