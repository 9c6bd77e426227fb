"""Tests for the Bessel-potential kernel and its derivatives."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from chemotaxis_lab.analysis.norms import lp_norm
from chemotaxis_lab.errors import PreconditionError
from chemotaxis_lab.operations.initial_data import gaussian_bump
from chemotaxis_lab.spectral.grid import RealField, make_grid, spectral_gradient
from chemotaxis_lab.spectral.kernels import (
    bessel_kernel_1d,
    bessel_kernel_1d_derivative,
    convolve_bessel_kernel_1d,
    grad_K_conv,
    grad_kernel_l1_quadrature_1d,
    grad_kernel_lr_norm_1d,
    neg_laplace_K_conv,
    solve_chemoattractant,
)


def test_chemoattractant_of_a_lattice_mode(grid_1d):
    k = 2.0 * math.pi * 4 / grid_1d.extent[0]
    wave = RealField(grid_1d, np.cos(k * grid_1d.coordinates()[0]))
    psi = solve_chemoattractant(wave)
    assert np.max(np.abs(psi.values - wave.values / (1.0 + k * k))) < 1e-13


def test_spectral_and_physical_convolution_agree():
    grid = make_grid(1, 64.0, 512)
    bump = gaussian_bump(grid, 2.0)
    spectral = solve_chemoattractant(bump)
    physical = convolve_bessel_kernel_1d(bump)
    # the Riemann sum is second order at the kernel's kink
    assert np.max(np.abs(spectral.values - physical.values)) < 5e-3 * spectral.max_abs()


def test_grad_K_is_gradient_of_chemoattractant(grid_2d, smooth_field):
    field = smooth_field(grid_2d, amplitude=1.0)
    direct = grad_K_conv(field)
    composed = spectral_gradient(solve_chemoattractant(field))
    for lhs, rhs in zip(direct, composed):
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12


def test_neg_laplace_K_is_bounded_by_one(grid_1d, smooth_field):
    for _ in range(5):
        field = smooth_field(grid_1d, amplitude=1.0, max_mode=80)
        assert lp_norm(neg_laplace_K_conv(field), 2.0) <= lp_norm(field, 2.0)


def test_closed_form_kernel_values():
    assert bessel_kernel_1d(0.0) == pytest.approx(0.5)
    assert bessel_kernel_1d(1.0) == pytest.approx(0.5 * math.exp(-1.0))
    assert bessel_kernel_1d_derivative(0.0) == 0.0
    assert bessel_kernel_1d_derivative(2.0) == pytest.approx(-0.5 * math.exp(-2.0))
    assert bessel_kernel_1d_derivative(-2.0) == pytest.approx(0.5 * math.exp(-2.0))


def test_kernel_has_unit_mass():
    x = np.linspace(-40.0, 40.0, 80001)
    assert trapezoid(bessel_kernel_1d(x), x) == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize(("r", "expected"), [(1.0, 1.0), (2.0, 0.5), (math.inf, 0.5)])
def test_grad_kernel_norms(r, expected):
    assert grad_kernel_lr_norm_1d(r) == pytest.approx(expected)


def test_grad_kernel_norm_rejects_small_exponent():
    with pytest.raises(PreconditionError):
        grad_kernel_lr_norm_1d(0.5)


def test_grad_kernel_quadrature_matches_closed_form():
    assert grad_kernel_l1_quadrature_1d(make_grid(1, 40.0, 16384)) == pytest.approx(1.0, abs=1e-6)


def test_grad_kernel_quadrature_is_second_order(grid_1d):
    h = grid_1d.spacing[0]
    assert grad_kernel_l1_quadrature_1d(grid_1d) == pytest.approx(1.0 + h * h / 12.0, rel=1e-4)
    assert grad_kernel_l1_quadrature_1d(make_grid(1, 4.0, 64)) == pytest.approx(
        1.0 - math.exp(-2.0), rel=0.05
    )


def test_grad_K_is_bounded_by_a_half(grid_1d, rng):
    for _ in range(5):
        field = RealField(grid_1d, rng.standard_normal(grid_1d.shape))
        (gradient,) = grad_K_conv(field)
        assert lp_norm(gradient, 2.0) <= 0.5 * lp_norm(field, 2.0) * (1.0 + 1e-12)


def test_narrow_bump_sees_the_closed_form_kernel():
    grid = make_grid(1, 64.0, 2048)
    bump = gaussian_bump(grid, 0.1)
    psi = solve_chemoattractant((1.0 / bump.integral()) * bump)
    x = grid.coordinates()[0]
    outside = (np.abs(x) >= 0.5) & (np.abs(x) <= 10.0)
    exact = bessel_kernel_1d(x[outside])
    assert np.max(np.abs(psi.values[outside] - exact) / exact) <= 0.02


def test_constants_are_fixed_by_K_and_killed_by_its_derivatives(grid_2d):
    constant = RealField(grid_2d, np.full(grid_2d.shape, 2.0))
    assert np.max(np.abs(solve_chemoattractant(constant).values - 2.0)) < 1e-12
    assert np.max(np.abs(neg_laplace_K_conv(constant).values)) < 1e-12
    for component in grad_K_conv(constant):
        assert np.max(np.abs(component.values)) < 1e-12


def test_closed_forms_are_one_dimensional(grid_2d):
    with pytest.raises(PreconditionError):
        grad_kernel_l1_quadrature_1d(grid_2d)
