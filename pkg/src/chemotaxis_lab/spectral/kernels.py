"""Bessel-potential kernel K = (1 - Laplacian)^{-1} and its derivatives.

The chemoattractant solves (1 - Laplacian) psi = u, so psi = K * u with
symbol 1/(1 + |k|^2). In one dimension K(x) = exp(-|x|)/2, which gives
closed forms for K' and its L^r norms.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.linalg import circulant

from ..errors import PreconditionError
from .grid import Grid, RealField, apply_multiplier, physical_array, spectral_array

logger = logging.getLogger(__name__)


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@lru_cache(maxsize=32)
def bessel_multiplier(grid: Grid) -> np.ndarray:
    """Symbol 1/(1 + |k|^2) on the lattice."""
    return _read_only(1.0 / (1.0 + grid.k_squared))


@lru_cache(maxsize=32)
def grad_kernel_multipliers(grid: Grid) -> tuple[np.ndarray, ...]:
    """Symbols i k_j / (1 + |k|^2) of the components of grad K."""
    base = bessel_multiplier(grid)
    return tuple(_read_only(1j * k * base) for k in grid.derivative_k)


@lru_cache(maxsize=32)
def neg_laplace_kernel_multiplier(grid: Grid) -> np.ndarray:
    """Symbol |k|^2 / (1 + |k|^2) of -Laplacian K, bounded by 1."""
    return _read_only(grid.k_squared / (1.0 + grid.k_squared))


def solve_chemoattractant(field: RealField) -> RealField:
    """Return psi = K * u, the solution of (1 - Laplacian) psi = u."""
    return apply_multiplier(field, bessel_multiplier(field.grid))


def grad_K_conv(field: RealField) -> tuple[RealField, ...]:
    coefficients = spectral_array(field.values)
    return tuple(
        RealField(field.grid, physical_array(symbol * coefficients))
        for symbol in grad_kernel_multipliers(field.grid)
    )


def neg_laplace_K_conv(field: RealField) -> RealField:
    return apply_multiplier(field, neg_laplace_kernel_multiplier(field.grid))


def bessel_kernel_1d(x: float | np.ndarray) -> float | np.ndarray:
    """K(x) = exp(-|x|)/2 on the whole line."""
    values = 0.5 * np.exp(-np.abs(np.asarray(x, dtype=np.float64)))
    return float(values) if values.ndim == 0 else values


def bessel_kernel_1d_derivative(x: float | np.ndarray) -> float | np.ndarray:
    """K'(x) = -sign(x) exp(-|x|)/2, taken as 0 at the origin."""
    array = np.asarray(x, dtype=np.float64)
    values = -0.5 * np.sign(array) * np.exp(-np.abs(array))
    return float(values) if values.ndim == 0 else values


def grad_kernel_lr_norm_1d(r: float) -> float:
    """Closed-form L^r norm of K' on the line.

    ||K'||_r^r = 2 * integral_0^inf (exp(-x)/2)^r dx = 2^(1-r) / r,
    and the sup norm is 1/2.

    Args:
        r: Exponent in [1, inf]

    Returns:
        The norm.
    """
    if math.isinf(r):
        return 0.5
    if r < 1:
        raise PreconditionError(f"exponent must be >= 1, got {r}")
    return (2.0 ** (1.0 - r) / r) ** (1.0 / r)


def grad_kernel_l1_quadrature_1d(grid: Grid) -> float:
    """Node-rule quadrature of |K'| over the box.

    K' jumps from 1/2 to -1/2 across the origin node, where it is set to 0;
    that node takes |K'| = 1/2 instead, which makes the sum the trapezoid
    rule on each half-line. The error is about h^2/12 plus the mass
    exp(-L/2) outside the box.
    """
    if grid.dim != 1:
        raise PreconditionError("the closed-form kernel is one-dimensional")
    values = np.abs(bessel_kernel_1d_derivative(grid.axis_coordinates(0)))
    values[grid.points[0] // 2] = 0.5
    return float(np.sum(values) * grid.spacing[0])


def convolve_bessel_kernel_1d(field: RealField) -> RealField:
    """Physical-space periodic convolution with K, as a Riemann sum.

    Independent of the spectral path, so the two can be cross-checked.
    """
    grid = field.grid
    if grid.dim != 1:
        raise PreconditionError("the closed-form kernel is one-dimensional")
    length = grid.extent[0]
    h = grid.spacing[0]
    offsets = np.arange(grid.points[0]) * h
    offsets = np.where(offsets >= 0.5 * length, offsets - length, offsets)
    matrix = circulant(bessel_kernel_1d(offsets))
    return RealField(grid, h * (matrix @ field.values))
