"""Picard contraction and the uniformly local norm inequalities."""

from __future__ import annotations

import logging
import math

import numpy as np

from ...analysis.norms import (
    InequalityReport,
    check_cube_ball_sandwich,
    check_window_equivalence,
    check_young_uloc,
    heat_uloc_spotcheck,
    lp_norm,
    uloc_norm,
)
from ...dynamics.picard import picard_solve
from ...dynamics.solver import evolve
from ...models.config import NormSpec
from ...spectral.grid import RealField, make_grid
from ..initial_data import gaussian_bump, periodic_comb, smooth_random_field
from .base import ExperimentContext, ExperimentOutcome, at_most, flag, within

logger = logging.getLogger(__name__)

HEAT_TIMES = (0.05, 0.5, 5.0)
EXPONENTS = (1.0, 2.0, math.inf)


def run_picard(ctx: ExperimentContext) -> ExperimentOutcome:
    """Picard iteration of the Duhamel map against the ETD solver."""
    cfg = ctx.config
    params = cfg.picard
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()
    result = picard_solve(
        cfg.A,
        v0,
        params.horizon,
        max_iter=params.max_iter,
        substeps=params.substeps,
        tol=params.tol,
        p=params.p,
        dealias=cfg.solver.dealias,
    )
    outcome.measured["distances"] = list(result.distances)
    outcome.measured["contraction_ratios"] = list(result.contraction_ratios)
    outcome.measured["iterations"] = len(result.distances)
    outcome.add(flag("picard_converged", result.converged, measured=result.distances[-1]))
    outcome.add(at_most("contraction_ratio", result.max_ratio, params.ratio_bound))

    trajectory = evolve(v0, cfg.solver_for(horizon=params.horizon))
    gap = lp_norm(trajectory.final - result.final, 2.0) / max(lp_norm(trajectory.final, 2.0), 1e-300)
    outcome.measured["etd_gap"] = gap
    outcome.add(at_most("agrees_with_etd", gap, params.agreement_tol))
    ctx.log(f"Picard: {len(result.distances)} iterations, max ratio {result.max_ratio:.3g}", "INFO")
    return outcome


def _tally(outcome: ExperimentOutcome, name: str, reports: list[InequalityReport]) -> None:
    failures = [r for r in reports if not r.passed]
    outcome.measured[f"{name}_cases"] = len(reports)
    outcome.measured[f"{name}_failures"] = len(failures)
    detail = "" if not failures else f"first failure: {failures[0].as_dict()}"
    outcome.add(flag(name, not failures, detail=detail))


def _sample_fields(ctx: ExperimentContext, stream: str, count: int) -> list[RealField]:
    """Random smooth fields, some shifted positive, plus a few structured ones."""
    grid = ctx.grid
    rng = ctx.rng(stream)
    limit = min(grid.points) // 3 - 1
    fields = []
    for i in range(count):
        field = smooth_random_field(grid, rng, float(rng.uniform(0.1, 10.0)), int(rng.integers(1, limit)))
        fields.append(field + float(rng.uniform(0.0, 2.0)) if i % 2 else field)
    return fields


def run_norms_suite(ctx: ExperimentContext) -> ExperimentOutcome:
    """Cube-ball sandwich, Young and heat bounds, window equivalence, scaling facts."""
    cfg, grid = ctx.config, ctx.grid
    suite = cfg.suite
    outcome = ExperimentOutcome()

    fields = _sample_fields(ctx, "sandwich", suite.sandwich_fields)
    structured = [
        RealField(grid, np.full(grid.shape, 3.0)),
        gaussian_bump(grid, 0.05, center=0.5),
        periodic_comb(grid, 1.0, 0.1, 1.0),
    ]
    sandwich = [
        check_cube_ball_sandwich(field, p)
        for i, field in enumerate([*fields, *structured])
        for p in (EXPONENTS if i >= len(fields) else (EXPONENTS[i % 3],))
    ]
    _tally(outcome, "cube_ball_sandwich", sandwich)

    fields = _sample_fields(ctx, "young", suite.random_fields)
    young = [check_young_uloc(field, 2.0, 2.0, 1.0) for field in fields]
    young += [check_young_uloc(field, math.inf, 2.0, 2.0) for field in fields[:20]]
    _tally(outcome, "young_uloc", young)
    constant = max(r.empirical_constant for r in young)
    outcome.measured["young_empirical_constant"] = constant
    outcome.add(at_most("young_constant", constant, suite.young_max_constant))

    contraction = [
        heat_uloc_spotcheck(field, p, p, t)
        for field in fields[:20]
        for p in EXPONENTS
        for t in HEAT_TIMES
    ]
    _tally(outcome, "heat_contraction", contraction)
    smoothing = [
        heat_uloc_spotcheck(field, math.inf, 1.0, 1.0, suite.heat_max_constant) for field in fields[:50]
    ]
    _tally(outcome, "heat_smoothing", smoothing)
    outcome.measured["heat_smoothing_constant"] = max(r.empirical_constant for r in smoothing)

    equivalence = [check_window_equivalence(field, 2.0, 0.5, 2.0) for field in fields[:20]]
    _tally(outcome, "window_equivalence", equivalence)

    value = 3.0
    constant_uloc = uloc_norm(structured[0], NormSpec(p=2.0))
    spacing = grid.spacing[0]
    outcome.add(within("uloc_of_constant", constant_uloc, math.sqrt(2.0) * value, spacing))

    below_lp = all(uloc_norm(field, NormSpec(p=p)) <= lp_norm(field, p) * (1.0 + 1e-12)
                   for field in fields[:20] for p in (1.0, 2.0))
    outcome.add(flag("uloc_below_lp", below_lp))

    # a comb keeps its uniformly local norm when the box doubles, while its L2 norm grows
    wide = make_grid(1, 2.0 * grid.extent[0], 2 * grid.points[0])
    narrow_comb, wide_comb = structured[2], periodic_comb(wide, 1.0, 0.1, 1.0)
    spec = NormSpec(p=2.0)
    outcome.add(
        within("comb_uloc_box_independent", uloc_norm(wide_comb, spec), uloc_norm(narrow_comb, spec), 1e-9)
    )
    outcome.add(
        within("comb_l2_grows", lp_norm(wide_comb, 2.0), math.sqrt(2.0) * lp_norm(narrow_comb, 2.0), 1e-9)
    )
    ctx.log(f"Norm suite: {len(outcome.checks)} checks", "INFO")
    return outcome
