"""Experiments that run the nonlinear ETD solver."""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from ...analysis.fitting import fit_exponential
from ...analysis.norms import lp_norm
from ...analysis.semigroup import apply_semigroup, lattice_max_rate, spectral_abscissa
from ...dynamics.diagnostics import BlowupKind, check_positivity, detect_blowup
from ...dynamics.solver import Trajectory, TrajectoryStatus, convergence_order, evolve, mean_drift
from ...errors import PreconditionError
from ...models.config import Formulation, Scheme, StopNorm
from ..artifacts import SeriesArtifact
from .base import ExperimentContext, ExperimentOutcome, at_most, flag, within

logger = logging.getLogger(__name__)

MEAN_DRIFT_TOLERANCE = 1e-12
SUP_GROWTH_SLACK = 1e-12


def _record_run(outcome: ExperimentOutcome, trajectory: Trajectory, prefix: str = "") -> None:
    outcome.measured[f"{prefix}status"] = trajectory.status.value
    outcome.measured[f"{prefix}halt_time"] = trajectory.halt_time
    outcome.measured[f"{prefix}final_linf"] = float(trajectory.linf[-1])
    outcome.measured[f"{prefix}steps"] = int(trajectory.times.size - 1)
    if trajectory.message:
        outcome.notes.append(f"{prefix or 'run '}{trajectory.message}".strip())


def run_growth(ctx: ExperimentContext) -> ExperimentOutcome:
    """Exponential rate of a near-eigenmode packet against the spectral abscissa."""
    cfg = ctx.config
    params = cfg.growth
    if cfg.A <= 1.0:
        raise PreconditionError(f"growth experiments need A > 1, got A={cfg.A}")
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()
    solver = cfg.solver_for(stop_amplitude=params.amplitude_fraction * cfg.A, stop_norm=StopNorm.LINF)
    trajectory = evolve(v0, solver)
    _record_run(outcome, trajectory)
    outcome.series.append(SeriesArtifact.from_trajectory(trajectory))

    abscissa = spectral_abscissa(cfg.A)
    outcome.reference["rate"] = abscissa
    outcome.measured["lattice_max_rate"] = lattice_max_rate(cfg.A, ctx.grid)
    outcome.add(
        flag(
            "stop_amplitude_reached",
            trajectory.status is TrajectoryStatus.STOPPED,
            detail=trajectory.message or "horizon reached before the stop amplitude",
        )
    )

    t_stop = trajectory.halt_time if trajectory.halt_time is not None else float(trajectory.times[-1])
    t_min = cfg.fit_window.t_min if cfg.fit_window.t_min is not None else params.transient_fraction * t_stop
    t_max = cfg.fit_window.t_max if cfg.fit_window.t_max is not None else t_stop
    fit = fit_exponential(trajectory.times, trajectory.l2, (t_min, t_max))
    outcome.measured["rate"] = fit.exponent
    outcome.measured["fit"] = fit.as_dict()
    outcome.add(within("growth_rate", fit.exponent, abscissa, params.tolerance))
    ctx.log(f"Growth rate {fit.exponent:.5f} against abscissa {abscissa:.5f}", "INFO")
    return outcome


def admissible_pair(p: float, q: float, dim: int) -> bool:
    """Exponent pairs covered by the small-data decay estimate: p <= n < q <= 2p."""
    return p <= dim < q <= 2.0 * p


def _weighted_norms(trajectory: Trajectory, exponents: list[float]) -> dict[str, float]:
    """sup_t ||v||_p + sup_t t^{(n/2)(1/p - 1/q)} ||v||_q over ordered exponent pairs."""
    series = {1.0: trajectory.l1, 2.0: trajectory.l2, math.inf: trajectory.linf}
    n = trajectory.grid.dim
    t = trajectory.times
    values: dict[str, float] = {}
    for p, q in itertools.combinations(sorted(exponents), 2):
        weight = t ** ((n / 2.0) * (1.0 / p - (0.0 if math.isinf(q) else 1.0 / q)))
        values[f"X[{p:g},{q:g}]"] = float(np.max(series[p]) + np.max(weight * series[q]))
    return values


def run_stability(ctx: ExperimentContext) -> ExperimentOutcome:
    """Small data below the threshold stays small; the same data grows above it."""
    cfg = ctx.config
    params = cfg.stability
    if cfg.A >= 1.0:
        raise PreconditionError(f"stability experiments need A < 1, got A={cfg.A}")
    unsupported = [p for p in params.exponents if p not in (1.0, 2.0, math.inf)]
    if unsupported:
        raise PreconditionError(f"stability norms are recorded for p in 1, 2, inf; got {unsupported}")
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()

    trajectory = evolve(v0, cfg.solver_for())
    _record_run(outcome, trajectory)
    outcome.series.append(SeriesArtifact.from_trajectory(trajectory))
    status = detect_blowup(trajectory)
    outcome.measured["classification"] = status.kind.value
    outcome.add(flag("global_existence", status.kind is BlowupKind.GLOBAL, detail=status.kind.value))

    late = trajectory.times >= params.monotone_after
    sup = trajectory.linf[late]
    increases = np.diff(sup) > SUP_GROWTH_SLACK * sup[:-1] if sup.size > 1 else np.zeros(0, dtype=bool)
    outcome.measured["sup_increases"] = int(np.count_nonzero(increases))
    outcome.add(flag("sup_norm_nonincreasing", not np.any(increases)))

    weighted = _weighted_norms(trajectory, params.exponents)
    outcome.measured.update(weighted)
    outcome.measured["admissible_pairs"] = [
        name for name, (p, q) in zip(weighted, itertools.combinations(sorted(params.exponents), 2))
        if admissible_pair(p, q, ctx.grid.dim)
    ]
    outcome.add(flag("weighted_norms_finite", all(math.isfinite(v) for v in weighted.values())))

    control = evolve(
        v0,
        cfg.solver_for(
            A=params.control_A,
            stop_amplitude=cfg.growth.amplitude_fraction * params.control_A,
            stop_norm=StopNorm.LINF,
        ),
    )
    _record_run(outcome, control, prefix="control_")
    outcome.series.append(SeriesArtifact.from_trajectory(control, filename="series_control.csv"))
    grown = control.status is not TrajectoryStatus.COMPLETED or control.linf[-1] >= 10.0 * control.linf[0]
    outcome.add(flag("control_grows", grown, detail=f"A={params.control_A:g}: {control.status.value}"))
    ctx.log(f"Stability run: {status.kind.value}; control {control.status.value}", "INFO")
    return outcome


def run_evolve(ctx: ExperimentContext) -> ExperimentOutcome:
    """Plain evolution with norm series, mean conservation and blow-up classification."""
    cfg = ctx.config
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()
    trajectory = evolve(v0, cfg.solver_for(), uloc=cfg.norm)
    _record_run(outcome, trajectory)
    outcome.series.append(
        SeriesArtifact.from_trajectory(trajectory, uloc_p=cfg.norm.p if cfg.norm else None)
    )
    status = detect_blowup(trajectory)
    outcome.measured["classification"] = status.kind.value
    drift = mean_drift(trajectory)
    outcome.measured["mean_drift"] = drift
    outcome.add(at_most("mean_conserved", drift, MEAN_DRIFT_TOLERANCE * max(1.0, abs(trajectory.mean[0]))))
    outcome.add(flag("no_blowup", status.kind is not BlowupKind.BLOWUP, detail=status.kind.value))
    if trajectory.uloc is not None:
        outcome.measured["uloc_initial"] = float(trajectory.uloc[0])
        outcome.measured["uloc_max"] = float(np.max(trajectory.uloc))
        outcome.add(flag("uloc_finite", bool(np.all(np.isfinite(trajectory.uloc)))))
    if cfg.solver.formulation is Formulation.RAW:
        report = check_positivity(trajectory, cfg.solver.positivity_tol)
        outcome.measured["min_value"] = report.min_value
        outcome.notes.append(f"positivity {'held' if report.passed else 'violated'}")
    return outcome


def run_positivity(ctx: ExperimentContext) -> ExperimentOutcome:
    """Nonnegative data must stay nonnegative up to the tolerance."""
    cfg = ctx.config
    if cfg.solver.formulation is not Formulation.RAW:
        raise PreconditionError("positivity experiments need the raw formulation")
    outcome = ExperimentOutcome()
    u0 = ctx.initial_field()
    trajectory = evolve(u0, cfg.solver_for())
    _record_run(outcome, trajectory)
    outcome.series.append(SeriesArtifact.from_trajectory(trajectory))
    report = check_positivity(trajectory, cfg.solver.positivity_tol)
    outcome.measured["min_value"] = report.min_value
    outcome.measured["violations"] = len(report.violations)
    outcome.reference["threshold"] = report.threshold
    if report.note:
        outcome.notes.append(report.note)
    for violation in report.violations[:10]:
        outcome.notes.append(f"min {violation.value:.3e} at t={violation.time:g}")
    outcome.add(flag("positivity", report.passed, measured=report.min_value, detail=report.note))
    drift = mean_drift(trajectory)
    outcome.measured["mean_drift"] = drift
    outcome.add(at_most("mass_conserved", drift, MEAN_DRIFT_TOLERANCE * max(1.0, abs(trajectory.mean[0]))))
    return outcome


def run_consistency(ctx: ExperimentContext) -> ExperimentOutcome:
    """Raw and perturbation runs agree; tiny data follows the linear semigroup."""
    cfg = ctx.config
    params = cfg.consistency
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()

    for A in params.A_values:
        perturbation = evolve(v0, cfg.solver_for(A=A, formulation=Formulation.PERTURBATION))
        raw = evolve(v0 + A, cfg.solver_for(A=A, formulation=Formulation.RAW))
        if perturbation.status is not TrajectoryStatus.COMPLETED or raw.status is not TrajectoryStatus.COMPLETED:
            outcome.add(flag(f"formulations_agree[A={A:g}]", False, detail="a run did not complete"))
            continue
        scale = max(float(np.max(perturbation.linf)), 1e-300)
        gap = max(
            float(np.max(np.abs((u.values - A) - v.values)))
            for u, v in zip(raw.fields, perturbation.fields)
        )
        outcome.measured[f"formulation_gap[A={A:g}]"] = gap / scale
        outcome.add(at_most(f"formulations_agree[A={A:g}]", gap / scale, params.tolerance))
        if A == params.A_values[0]:
            outcome.series.append(SeriesArtifact.from_trajectory(perturbation))

    A = params.A_values[0]
    unit = (1.0 / v0.max_abs()) * v0
    deviations = []
    for epsilon in params.epsilons:
        data = epsilon * unit
        trajectory = evolve(data, cfg.solver_for(A=A))
        linear = apply_semigroup(A, float(trajectory.times[-1]), data)
        deviations.append(lp_norm(trajectory.final - linear, 2.0) / lp_norm(linear, 2.0))
    outcome.measured["linear_limit_deviations"] = deviations
    ordered = sorted(zip(params.epsilons, deviations), reverse=True)
    shrinks = all(
        small_dev <= 2.0 * (small_eps / big_eps) * big_dev
        for (big_eps, big_dev), (small_eps, small_dev) in zip(ordered, ordered[1:])
    )
    outcome.add(flag("linear_limit", shrinks, detail="deviation shrinks in proportion to the amplitude"))
    return outcome


def run_convergence(ctx: ExperimentContext) -> ExperimentOutcome:
    """Observed temporal order of ETD1 and ETD-RK2."""
    cfg = ctx.config
    params = cfg.convergence
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()
    ranges = {Scheme.ETD1: params.etd1_range, Scheme.ETD_RK2: params.etd_rk2_range}
    for scheme, (low, high) in ranges.items():
        report = convergence_order(v0, cfg.solver_for(scheme=scheme), params.base_dt)
        outcome.measured[f"ratio[{scheme.value}]"] = report.ratio
        outcome.measured[f"errors[{scheme.value}]"] = list(report.errors)
        outcome.reference[f"ratio[{scheme.value}]"] = report.expected_ratio
        outcome.add(
            flag(
                f"convergence_order[{scheme.value}]",
                low <= report.ratio <= high,
                measured=report.ratio,
                detail=f"expected ratio in [{low:g}, {high:g}]",
            )
        )
        ctx.log(f"{scheme.value}: error ratio {report.ratio:.3f}", "INFO")
    return outcome
