"""Tests for the dispersion relation and the linearized semigroup."""

import math

import numpy as np
import pytest

from chemotaxis_lab.analysis.norms import heat_propagate, lp_norm
from chemotaxis_lab.analysis.semigroup import (
    apply_grad_semigroup,
    apply_linear_operator,
    apply_semigroup,
    boundary_mass_fraction,
    build_near_eigenmode,
    dispersion_rate,
    eigenmode_deviation,
    eigenmode_residual,
    lattice_max_rate,
    mu_l1_probe,
    peak_wavenumber,
    reference_decay_exponent,
    semigroup_decay_probe,
    spectral_abscissa,
    wave_packet,
)
from chemotaxis_lab.errors import BoundaryContaminationError, PreconditionError
from chemotaxis_lab.operations.initial_data import gaussian_bump, resonant_extent
from chemotaxis_lab.spectral.grid import RealField, make_grid, spectral_gradient


@pytest.fixture(scope="module")
def decay_grid():
    return make_grid(1, 409.6, 4096)


@pytest.fixture(scope="module")
def unit_mass_bump(decay_grid):
    bump = gaussian_bump(decay_grid, 0.5)
    return (1.0 / bump.integral()) * bump


class TestDispersion:
    @pytest.mark.parametrize("A", [0.0, 0.5, 1.0])
    def test_abscissa_vanishes_up_to_the_threshold(self, A):
        assert spectral_abscissa(A) == 0.0

    @pytest.mark.parametrize("A", [1.5, 2.0, 4.0, 9.0])
    def test_abscissa_closed_form(self, A):
        assert spectral_abscissa(A) == pytest.approx(A - 2.0 * math.sqrt(A) + 1.0, abs=1e-12)

    @pytest.mark.parametrize("A", [1.5, 2.0, 4.0, 9.0])
    def test_abscissa_is_the_maximum_of_the_dispersion_relation(self, A):
        k = np.linspace(1e-4, 10.0, 200001)
        rates = dispersion_rate(A, k)
        assert np.max(rates) <= spectral_abscissa(A) + 1e-12
        assert np.max(rates) == pytest.approx(spectral_abscissa(A), abs=1e-8)
        assert dispersion_rate(A, peak_wavenumber(A)) == pytest.approx(spectral_abscissa(A), abs=1e-12)

    def test_mean_mode_is_neutral(self):
        assert dispersion_rate(3.0, 0.0) == 0.0

    def test_peak_wavenumber_at_A_4(self):
        assert peak_wavenumber(4.0) == pytest.approx(1.0)

    def test_no_peak_below_threshold(self):
        with pytest.raises(PreconditionError):
            peak_wavenumber(0.5)

    def test_lattice_rate_never_exceeds_abscissa(self, grid_1d):
        for A in (1.5, 2.0, 4.0):
            assert lattice_max_rate(A, grid_1d) <= spectral_abscissa(A) + 1e-12

    @pytest.mark.parametrize(("dim", "p", "q", "gradient", "expected"), [
        (1, math.inf, 1.0, False, -0.5),
        (1, math.inf, 1.0, True, -1.0),
        (2, 2.0, 1.0, False, -0.5),
        (1, 2.0, 2.0, False, 0.0),
    ])
    def test_reference_decay_exponent(self, dim, p, q, gradient, expected):
        assert reference_decay_exponent(dim, p, q, gradient) == pytest.approx(expected)


class TestSemigroup:
    def test_single_mode_evolves_by_its_rate(self, grid_1d):
        k = 2.0 * math.pi * 5 / grid_1d.extent[0]
        wave = RealField(grid_1d, np.cos(k * grid_1d.coordinates()[0]))
        for A in (0.5, 2.0):
            evolved = apply_semigroup(A, 2.0, wave)
            exact = math.exp(2.0 * dispersion_rate(A, k)) * wave.values
            assert np.max(np.abs(evolved.values - exact)) < 1e-12

    def test_composition(self, grid_2d, smooth_field):
        v = smooth_field(grid_2d, amplitude=1.0)
        lhs = apply_semigroup(2.0, 0.3, apply_semigroup(2.0, 0.7, v))
        rhs = apply_semigroup(2.0, 1.0, v)
        assert lp_norm(lhs - rhs, 2.0) <= 1e-11 * lp_norm(rhs, 2.0)

    def test_zero_background_is_the_heat_flow(self, grid_1d, smooth_field):
        v = smooth_field(grid_1d, amplitude=1.0)
        assert np.allclose(apply_semigroup(0.0, 1.5, v).values, heat_propagate(v, 1.5).values, atol=1e-14)

    def test_mean_is_preserved(self, grid_1d):
        bump = gaussian_bump(grid_1d, 2.0)
        assert apply_semigroup(0.8, 10.0, bump).mean() == pytest.approx(bump.mean(), rel=1e-12)

    def test_threshold_is_non_expansive(self, grid_1d, smooth_field):
        v = smooth_field(grid_1d, amplitude=1.0, max_mode=60)
        for t in (0.1, 1.0, 10.0):
            assert lp_norm(apply_semigroup(1.0, t, v), 2.0) <= lp_norm(v, 2.0) * (1.0 + 1e-12)

    def test_growth_is_bounded_by_the_abscissa(self, grid_1d, smooth_field):
        v = smooth_field(grid_1d, amplitude=1.0)
        for t in (0.5, 2.0):
            bound = math.exp(spectral_abscissa(4.0) * t) * lp_norm(v, 2.0)
            assert lp_norm(apply_semigroup(4.0, t, v), 2.0) <= bound * (1.0 + 1e-12)

    def test_gradient_commutes(self, grid_2d, smooth_field):
        v = smooth_field(grid_2d, amplitude=1.0)
        inside = apply_grad_semigroup(0.5, 1.0, v)
        outside = spectral_gradient(apply_semigroup(0.5, 1.0, v))
        for lhs, rhs in zip(inside, outside):
            assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12

    def test_generator_on_a_mode(self, grid_1d):
        k = 2.0 * math.pi * 3 / grid_1d.extent[0]
        wave = RealField(grid_1d, np.sin(k * grid_1d.coordinates()[0]))
        result = apply_linear_operator(2.0, wave)
        assert np.max(np.abs(result.values - dispersion_rate(2.0, k) * wave.values)) < 1e-13

    def test_negative_time_raises(self, grid_1d, smooth_field):
        with pytest.raises(PreconditionError):
            apply_semigroup(0.5, -1.0, smooth_field(grid_1d))


class TestDecayProbe:
    def test_heat_decay_exponent(self, unit_mass_bump):
        times = np.geomspace(5.0, 200.0, 40)
        fit = semigroup_decay_probe(0.0, math.inf, 1.0, unit_mass_bump, times, window=(5.0, 200.0))
        assert fit.exponent == pytest.approx(-0.5, abs=0.01)

    def test_subcritical_decay_exponent(self, unit_mass_bump):
        times = np.geomspace(5.0, 200.0, 40)
        fit = semigroup_decay_probe(0.5, math.inf, 1.0, unit_mass_bump, times, window=(5.0, 200.0))
        assert fit.exponent == pytest.approx(-0.5, abs=0.05)

    def test_gradient_decay_exponent(self, unit_mass_bump):
        times = np.geomspace(5.0, 200.0, 40)
        fit = semigroup_decay_probe(
            0.0, math.inf, 1.0, unit_mass_bump, times, window=(5.0, 200.0), gradient=True
        )
        assert fit.exponent == pytest.approx(-1.0, abs=0.05)

    def test_default_window_drops_the_transient(self, unit_mass_bump):
        times = np.geomspace(5.0, 200.0, 40)
        fit = semigroup_decay_probe(0.0, math.inf, 1.0, unit_mass_bump, times)
        assert fit.window[0] >= 5.0 + 0.2 * 195.0

    def test_contaminated_window_raises(self):
        grid = make_grid(1, 20.0, 256)
        bump = gaussian_bump(grid, 0.5)
        times = np.geomspace(1.0, 100.0, 10)
        with pytest.raises(BoundaryContaminationError) as excinfo:
            semigroup_decay_probe(0.0, math.inf, 1.0, bump, times, window=(1.0, 100.0))
        assert excinfo.value.fraction > 0.01

    @pytest.mark.parametrize(("A", "p", "q"), [(1.0, math.inf, 1.0), (0.5, 1.0, 2.0)])
    def test_rejects_invalid_arguments(self, unit_mass_bump, A, p, q):
        with pytest.raises(PreconditionError):
            semigroup_decay_probe(A, p, q, unit_mass_bump, [1.0, 2.0, 3.0])

    def test_heat_kernel_has_unit_mass(self, decay_grid):
        norms = mu_l1_probe(0.0, [1.0, 10.0, 100.0], decay_grid)
        assert np.allclose(norms, 1.0, atol=1e-10)

    def test_subcritical_kernel_stays_bounded(self, decay_grid):
        norms = mu_l1_probe(0.5, [1.0, 10.0, 50.0, 100.0], decay_grid)
        assert np.all(np.isfinite(norms))
        assert norms[-1] <= norms[1] * 1.05

    def test_kernel_probe_rejects_early_times(self, decay_grid):
        with pytest.raises(PreconditionError):
            mu_l1_probe(0.5, [0.5, 1.0], decay_grid)


class TestNearEigenmode:
    def test_wide_packet_is_nearly_an_eigenvector(self):
        grid = make_grid(1, resonant_extent(2.0, 32), 512)
        packet = build_near_eigenmode(2.0, 1.0, 30.0, grid)
        assert eigenmode_residual(2.0, packet) < 0.01
        assert eigenmode_deviation(2.0, packet, 1.0) < 0.01

    def test_l2_normalization(self):
        grid = make_grid(1, resonant_extent(4.0, 32), 512)
        packet = build_near_eigenmode(4.0, 1.0, 20.0, grid, l2_norm=1e-3)
        assert lp_norm(packet, 2.0) == pytest.approx(1e-3)
        assert abs(packet.mean()) < 1e-15

    def test_packet_must_fit_the_box(self, grid_1d):
        with pytest.raises(PreconditionError, match="10\\*width"):
            wave_packet(grid_1d, 1.0, 20.0, 1.0)

    def test_packet_must_fit_the_short_axis(self):
        grid = make_grid(2, [64.0, 16.0], 64)
        with pytest.raises(PreconditionError, match="every axis"):
            wave_packet(grid, 1.0, 2.0, 1.0)

    def test_centred_bump_has_no_boundary_mass(self, grid_1d):
        assert boundary_mass_fraction(gaussian_bump(grid_1d, 1.0)) < 1e-12
        values = np.zeros(grid_1d.shape)
        values[0] = 1.0
        assert boundary_mass_fraction(RealField(grid_1d, values)) == 1.0
