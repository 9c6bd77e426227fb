"""Experiments on the linearized semigroup: dispersion, operator checks, decay."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import stats

from ...analysis.norms import lp_norm
from ...analysis.semigroup import (
    apply_grad_semigroup,
    apply_semigroup,
    build_near_eigenmode,
    dispersion_rate,
    eigenmode_deviation,
    eigenmode_residual,
    lattice_gap,
    lattice_max_rate,
    mu_l1_probe,
    peak_wavenumber,
    reference_decay_exponent,
    semigroup_decay_probe,
    semigroup_symbol,
    spectral_abscissa,
)
from ...errors import PreconditionError
from ...models.report import CheckResult
from ...spectral.grid import RealField, make_grid, spectral_gradient
from ...spectral.kernels import grad_kernel_l1_quadrature_1d, neg_laplace_K_conv
from ..artifacts import SeriesArtifact
from ..initial_data import gaussian_bump, resonant_extent, smooth_random_field
from .base import ExperimentContext, ExperimentOutcome, at_most, flag, within

logger = logging.getLogger(__name__)

SCAN_STEP = 1e-5
SCAN_MAX = 10.0
ROUNDOFF = 1e-12


def _scan_abscissa(A: float) -> tuple[float, float]:
    """Largest dispersion rate over k in (0, 10] and where it occurs."""
    k = np.arange(1, int(round(SCAN_MAX / SCAN_STEP)) + 1) * SCAN_STEP
    rates = dispersion_rate(A, k)
    peak = int(np.argmax(rates))
    return float(rates[peak]), float(k[peak])


def run_dispersion(ctx: ExperimentContext) -> ExperimentOutcome:
    """Abscissa formula against a fine scan and the lattice maximum."""
    cfg, grid = ctx.config, ctx.grid
    outcome = ExperimentOutcome()
    for A in sorted({*cfg.suite.abscissa_values, cfg.A}):
        abscissa = spectral_abscissa(A)
        closed_form = A - 2.0 * math.sqrt(A) + 1.0 if A > 1.0 else 0.0
        scan, k_scan = _scan_abscissa(A)
        outcome.measured[f"abscissa[A={A:g}]"] = abscissa
        outcome.measured[f"scan_max[A={A:g}]"] = scan
        outcome.reference[f"abscissa[A={A:g}]"] = closed_form
        outcome.add(within(f"abscissa_closed_form[A={A:g}]", abscissa, closed_form, ROUNDOFF, relative=False))
        outcome.add(within(f"abscissa_scan[A={A:g}]", scan, abscissa, 1e-8, relative=False))
        if A > 1.0:
            k_star = peak_wavenumber(A)
            outcome.measured[f"peak_wavenumber[A={A:g}]"] = k_scan
            outcome.reference[f"peak_wavenumber[A={A:g}]"] = k_star
            outcome.add(within(f"peak_wavenumber[A={A:g}]", k_scan, k_star, SCAN_STEP, relative=False))
            outcome.add(
                within(f"peak_rate[A={A:g}]", dispersion_rate(A, k_star), abscissa, ROUNDOFF, relative=False)
            )

    abscissa = spectral_abscissa(cfg.A)
    lattice_rate = lattice_max_rate(cfg.A, grid)
    gap = lattice_gap(grid)
    outcome.measured["lattice_max_rate"] = lattice_rate
    outcome.measured["lattice_gap"] = gap
    outcome.reference["abscissa"] = abscissa
    outcome.add(
        CheckResult(
            name="lattice_rate_bracket",
            passed=abscissa - gap <= lattice_rate <= abscissa + ROUNDOFF,
            measured=lattice_rate,
            reference=abscissa,
            tolerance=gap,
            detail="a - gap <= lattice max <= a",
        )
    )
    ctx.log(f"Abscissa at A={cfg.A:g}: {abscissa:.6g}, lattice max {lattice_rate:.6g}", "INFO")
    return outcome


def _single_mode_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    grid = ctx.grid
    mode = 5
    k = 2.0 * math.pi * mode / grid.extent[0]
    wave = RealField(grid, np.cos(k * grid.coordinates()[0]))
    worst = 0.0
    for A in (0.5, 2.0):
        for t in (0.5, 2.0):
            exact = math.exp(t * dispersion_rate(A, k)) * wave.values
            evolved = apply_semigroup(A, t, wave).values
            worst = max(worst, float(np.max(np.abs(evolved - exact)) / np.max(np.abs(exact))))
    outcome.measured["single_mode_error"] = worst
    outcome.add(at_most("single_mode", worst, ROUNDOFF))


def _composition_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    grid, suite = ctx.grid, ctx.config.suite
    rng = ctx.rng("composition")
    worst = 0.0
    for _ in range(suite.composition_samples):
        A = float(rng.uniform(0.0, 4.0))
        s, t = (float(x) for x in rng.uniform(0.0, 2.0, size=2))
        v = smooth_random_field(grid, rng, 1.0, min(16, min(grid.points) // 3 - 1))
        lhs = apply_semigroup(A, s, apply_semigroup(A, t, v))
        rhs = apply_semigroup(A, s + t, v)
        worst = max(worst, lp_norm(lhs - rhs, 2.0) / lp_norm(rhs, 2.0))
    outcome.measured["composition_error"] = worst
    outcome.add(at_most("semigroup_composition", worst, 1e-11))


def _bound_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    """Norm bounds that hold mode by mode on the lattice."""
    grid, suite = ctx.grid, ctx.config.suite
    rng = ctx.rng("bounds")
    max_mode = min(grid.points) // 3 - 1
    fields = [smooth_random_field(grid, rng, 1.0, max_mode) for _ in range(suite.random_fields)]

    threshold_ratio = max(
        lp_norm(apply_semigroup(1.0, t, v), 2.0) / lp_norm(v, 2.0) for v in fields for t in (0.1, 1.0, 10.0)
    )
    outcome.measured["threshold_max_ratio"] = threshold_ratio
    outcome.add(at_most("threshold_nonexpansive", threshold_ratio, 1.0 + ROUNDOFF))

    laplace_ratio = max(lp_norm(neg_laplace_K_conv(v), 2.0) / lp_norm(v, 2.0) for v in fields)
    outcome.measured["neg_laplace_kernel_ratio"] = laplace_ratio
    outcome.add(at_most("neg_laplace_kernel_bound", laplace_ratio, 1.0 + ROUNDOFF))

    # the highest non-Nyquist mode sees the multiplier k^2 / (1 + k^2) exactly
    top = grid.points[0] // 2 - 1
    k_top = 2.0 * math.pi * top / grid.extent[0]
    wave = RealField(grid, np.cos(k_top * grid.coordinates()[0]))
    top_ratio = lp_norm(neg_laplace_K_conv(wave), 2.0) / lp_norm(wave, 2.0)
    outcome.measured["neg_laplace_kernel_top_mode"] = top_ratio
    outcome.add(within("neg_laplace_kernel_top_mode", top_ratio, k_top**2 / (1.0 + k_top**2), ROUNDOFF))

    heat = np.exp(-grid.k_squared)
    below = semigroup_symbol(-1.0, grid).multiplier(1.0)
    outcome.add(flag("negative_A_heat_domination", bool(np.all(below <= heat * (1.0 + 1e-14)))))

    A, abscissa = 4.0, spectral_abscissa(4.0)
    growth_ratio = max(
        lp_norm(apply_semigroup(A, t, v), 2.0) / (math.exp(abscissa * t) * lp_norm(v, 2.0))
        for v in fields[:10]
        for t in (0.5, 1.0, 2.0)
    )
    outcome.measured["growth_bound_ratio"] = growth_ratio
    outcome.add(at_most("growth_upper_bound", growth_ratio, 1.0 + ROUNDOFF))

    worst = 0.0
    for v in fields[:10]:
        inside = apply_grad_semigroup(0.5, 1.0, v)[0]
        outside = spectral_gradient(apply_semigroup(0.5, 1.0, v))[0]
        worst = max(worst, lp_norm(inside - outside, 2.0) / max(lp_norm(outside, 2.0), 1e-300))
    outcome.measured["gradient_commutation_error"] = worst
    outcome.add(at_most("gradient_commutation", worst, 1e-11))


def _kernel_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    """L1 norms of grad K and of the semigroup kernel below the threshold."""
    quadrature = grad_kernel_l1_quadrature_1d(make_grid(1, 40.0, 16384))
    outcome.measured["grad_kernel_l1"] = quadrature
    outcome.add(within("grad_kernel_l1", quadrature, 1.0, 1e-6, relative=False))

    grid = make_grid(1, 409.6, 4096)
    times = np.asarray(ctx.config.suite.mu_times, dtype=np.float64)
    heat_norms = mu_l1_probe(0.0, times, grid)
    norms = mu_l1_probe(0.5, times, grid)
    outcome.measured["mu_l1[A=0.5]"] = norms
    outcome.measured["mu_l1[A=0]"] = heat_norms
    outcome.add(at_most("heat_kernel_mass", float(np.max(np.abs(heat_norms - 1.0))), ROUNDOFF))
    late = times >= 10.0
    if np.count_nonzero(late) >= 2:
        slope = float(stats.linregress(np.log(times[late]), norms[late]).slope)
        outcome.measured["mu_l1_late_slope"] = slope
        outcome.add(at_most("mu_l1_no_late_growth", slope, 1e-3))
    outcome.add(flag("mu_l1_finite", bool(np.all(np.isfinite(norms))), measured=float(np.max(norms))))


def _eigenmode_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    A = 4.0
    grid = make_grid(1, resonant_extent(A, 64), 1024)
    packet = build_near_eigenmode(A, 1.0, 20.0, grid)
    deviation = eigenmode_deviation(A, packet, 1.0)
    outcome.measured["eigenmode_deviation[A=4]"] = deviation
    outcome.measured["eigenmode_residual[A=4]"] = eigenmode_residual(A, packet)
    outcome.add(at_most("near_eigenmode_deviation", deviation, 0.05))

    ratio = max(
        lp_norm(apply_semigroup(A, t, packet), 2.0) / (math.exp(spectral_abscissa(A) * t) * lp_norm(packet, 2.0))
        for t in np.linspace(0.5, 5.0, 10)
    )
    outcome.add(at_most("near_eigenmode_bounded", ratio, 2.0))

    A = 2.0
    grid = make_grid(1, resonant_extent(A, 64), 1024)
    packet = build_near_eigenmode(A, 1.0, 30.0, grid)
    growth = lp_norm(apply_semigroup(A, 2.0, packet), 2.0) / lp_norm(packet, 2.0)
    expected = math.exp(2.0 * spectral_abscissa(A))
    outcome.measured["eigenmode_growth[A=2]"] = growth
    outcome.reference["eigenmode_growth[A=2]"] = expected
    outcome.add(within("near_eigenmode_growth", growth, expected, 0.1))


def _gradient_probe_checks(ctx: ExperimentContext, outcome: ExperimentOutcome) -> None:
    grid = make_grid(1, 409.6, 4096)
    bump = gaussian_bump(grid, 0.5)
    v0 = (1.0 / bump.integral()) * bump
    reference = reference_decay_exponent(1, math.inf, 1.0, gradient=True)
    for A, (t0, t1) in ((0.0, (5.0, 200.0)), (0.5, (20.0, 400.0))):
        times = np.geomspace(t0, t1, 40)
        fit = semigroup_decay_probe(A, math.inf, 1.0, v0, times, window=(t0, t1), gradient=True)
        outcome.measured[f"gradient_exponent[A={A:g}]"] = fit.exponent
        outcome.add(within(f"gradient_decay[A={A:g}]", fit.exponent, reference, 0.05, relative=False))
    outcome.reference["gradient_exponent"] = reference


def run_operator_suite(ctx: ExperimentContext) -> ExperimentOutcome:
    """Randomized and exact checks of the semigroup, its kernel and the Bessel operators."""
    outcome = ExperimentOutcome()
    for part in (
        _single_mode_checks,
        _composition_checks,
        _bound_checks,
        _kernel_checks,
        _eigenmode_checks,
        _gradient_probe_checks,
    ):
        part(ctx, outcome)
        ctx.log(f"Operator checks {part.__name__.strip('_')} done", "INFO")
    return outcome


def _norm_series(A: float, v0: RealField, times: np.ndarray) -> SeriesArtifact:
    columns: dict[str, list[float]] = {"l1": [], "l2": [], "linf": [], "min": []}
    for t in times:
        field = apply_semigroup(A, float(t), v0)
        columns["l1"].append(lp_norm(field, 1.0))
        columns["l2"].append(lp_norm(field, 2.0))
        columns["linf"].append(lp_norm(field, math.inf))
        columns["min"].append(float(np.min(field.values)))
    return SeriesArtifact("series.csv", times, {name: np.asarray(v) for name, v in columns.items()})


def run_decay(ctx: ExperimentContext) -> ExperimentOutcome:
    """Fitted decay exponent of S_A(t)v0 against -(n/2)(1/q - 1/p)."""
    cfg = ctx.config
    params = cfg.decay
    if cfg.A >= 1.0:
        raise PreconditionError(f"decay experiments need A < 1, got A={cfg.A}")
    outcome = ExperimentOutcome()
    v0 = ctx.initial_field()
    times = np.geomspace(params.t_start, params.t_end, params.samples)
    window = (cfg.fit_window.t_min, cfg.fit_window.t_max)
    if window == (None, None):
        window = None
    reference = reference_decay_exponent(ctx.grid.dim, params.p, params.q, params.gradient)
    outcome.reference["exponent"] = reference
    outcome.measured[f"data_l{params.q:g}"] = lp_norm(v0, params.q)

    if params.heat_control:
        heat = semigroup_decay_probe(0.0, params.p, params.q, v0, times, window, params.gradient)
        outcome.measured["heat_exponent"] = heat.exponent
        outcome.add(within("heat_control", heat.exponent, reference, params.heat_tolerance, relative=False))

    fit = semigroup_decay_probe(cfg.A, params.p, params.q, v0, times, window, params.gradient)
    outcome.measured["exponent"] = fit.exponent
    outcome.measured["fit"] = fit.as_dict()
    outcome.add(within("decay_exponent", fit.exponent, reference, params.tolerance, relative=False))
    outcome.series.append(_norm_series(cfg.A, v0, times))
    ctx.log(f"Decay exponent {fit.exponent:.4f} against {reference:.4f}", "INFO")
    return outcome
