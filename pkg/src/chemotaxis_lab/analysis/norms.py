"""Lebesgue and uniformly local Lebesgue norms, and numeric checks of their inequalities.

The uniformly local norm is the sup over windows of the local L^p norm,

    ||f||_{uloc p} = sup_x ( integral over B_rho(x) of |f|^p )^{1/p},

finite for bounded functions that do not decay (constants, periodic combs).
Window sums run over grid nodes whose offset from the centre lies inside
the window; no partial-cell weighting.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import PreconditionError
from ..models.config import NormSpec, WindowShape
from ..spectral.grid import Grid, RealField, apply_multiplier
from ..spectral.kernels import grad_K_conv, grad_kernel_lr_norm_1d

logger = logging.getLogger(__name__)

INEQUALITY_SLACK = 1e-9
SCALING_TOLERANCE = 1e-12
YOUNG_BALL_FACTOR = 90.0
YOUNG_KERNEL_FACTOR = 54.0


def _check_exponent(p: float) -> None:
    if math.isnan(p) or p < 1.0:
        raise PreconditionError(f"Lebesgue exponent must be in [1, inf], got {p}")


def _reciprocal(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def _lp_of_array(values: np.ndarray, p: float, cell_volume: float) -> float:
    magnitude = np.abs(values)
    if math.isinf(p):
        return float(np.max(magnitude))
    return float((np.sum(magnitude**p) * cell_volume) ** (1.0 / p))


def lp_norm(field: RealField, p: float) -> float:
    """Riemann-sum L^p norm; the max of |f| for p = inf."""
    _check_exponent(p)
    return _lp_of_array(field.values, p, field.grid.cell_volume)


def _window_offsets(grid: Grid, radius: float) -> tuple[int, ...]:
    return tuple(int(math.floor(radius / h + 1e-9)) for h in grid.spacing)


def window_footprint(grid: Grid, radius: float, shape: WindowShape) -> np.ndarray:
    """Boolean stencil of node offsets inside a window of the given radius."""
    reach = _window_offsets(grid, radius)
    axes = [np.arange(-r, r + 1) * h for r, h in zip(reach, grid.spacing)]
    mesh = np.meshgrid(*axes, indexing="ij")
    if shape is WindowShape.CUBE:
        return np.logical_and.reduce([np.abs(d) <= radius * (1 + 1e-12) for d in mesh])
    return sum(d * d for d in mesh) <= radius * radius * (1 + 1e-12)


def _check_window(grid: Grid, radius: float) -> None:
    for length in grid.extent:
        if radius >= length / 4.0:
            raise PreconditionError(
                f"window radius {radius} must be below a quarter of the box extent {length}"
            )


def local_norms(field: RealField, spec: NormSpec) -> np.ndarray:
    """Local L^p norm of the window centred at every node (wrapping periodically)."""
    _check_exponent(spec.p)
    grid = field.grid
    _check_window(grid, spec.window_radius)
    footprint = window_footprint(grid, spec.window_radius, spec.window_shape)
    magnitude = np.abs(field.values)
    if math.isinf(spec.p):
        return ndimage.maximum_filter(magnitude, footprint=footprint, mode="wrap")
    sums = ndimage.correlate(magnitude**spec.p, footprint.astype(np.float64), mode="wrap")
    return (np.maximum(sums, 0.0) * grid.cell_volume) ** (1.0 / spec.p)


def uloc_norm(field: RealField, spec: NormSpec) -> float:
    """Max over window centres (every stride-th node) of the windowed L^p norm."""
    norms = local_norms(field, spec)
    centres = tuple(slice(None, None, spec.stride) for _ in range(field.grid.dim))
    return float(np.max(norms[centres]))


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of a checked inequality.

    For two-sided checks, lhs <= mid <= rhs; one-sided checks leave mid unset.
    """

    name: str
    lhs: float
    rhs: float
    passed: bool
    mid: float | None = None
    constant: float | None = None
    empirical_constant: float | None = None

    def as_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "mid": self.mid,
            "rhs": self.rhs,
            "passed": self.passed,
            "constant": self.constant,
            "empirical_constant": self.empirical_constant,
        }


def _cube_labels(grid: Grid) -> np.ndarray:
    """Index of the unit cube [k - 1/2, k + 1/2)^n holding each node, wrapped periodically."""
    labels = np.zeros(grid.shape, dtype=np.int64)
    stride = 1
    for axis in range(grid.dim):
        length, count = grid.extent[axis], grid.points[axis]
        if not float(length).is_integer():
            raise PreconditionError(f"cube decomposition needs an integer box side, got {length}")
        per_unit = count / length
        if not float(per_unit).is_integer():
            raise PreconditionError(
                f"cube decomposition needs an integer number of nodes per unit, got {per_unit}"
            )
        side, m = int(length), int(per_unit)
        j = np.arange(count, dtype=np.int64)
        # x_j + 1/2 = (2j + m(1 - L)) / (2m), floored in exact integer arithmetic
        cube = np.floor_divide(2 * j + m * (1 - side), 2 * m) % side
        shape = [1] * grid.dim
        shape[axis] = count
        labels = labels + stride * cube.reshape(shape)
        stride *= side
    return labels


def check_cube_ball_sandwich(field: RealField, p: float) -> InequalityReport:
    """3^{-n} sup_ball <= sup_cube <= 2^n sup_ball over unit balls and unit cubes.

    Raises:
        PreconditionError: Non-integer box side or node density, or p < 1.
    """
    _check_exponent(p)
    grid = field.grid
    labels = _cube_labels(grid)
    magnitude = np.abs(field.values)
    index = np.arange(int(labels.max()) + 1)
    if math.isinf(p):
        cube_sup = float(np.max(ndimage.maximum(magnitude, labels, index)))
    else:
        sums = ndimage.sum_labels(magnitude**p, labels, index)
        cube_sup = float(np.max(sums) * grid.cell_volume) ** (1.0 / p)
    ball_sup = uloc_norm(field, NormSpec(p=p, window_radius=1.0, window_shape=WindowShape.BALL))
    n = grid.dim
    lhs, rhs = ball_sup / 3.0**n, ball_sup * 2.0**n
    slack = 1.0 + INEQUALITY_SLACK
    passed = lhs <= cube_sup * slack and cube_sup <= rhs * slack
    return InequalityReport("cube_ball_sandwich", lhs=lhs, mid=cube_sup, rhs=rhs, passed=passed)


def check_young_uloc(field: RealField, p: float, q: float, r: float) -> InequalityReport:
    """Uniformly local Young bound for grad K * f in one dimension.

    Checks ||grad K * f||_{uloc p} <= (90 ||K'||_1 + 54 ||K'||_r) ||f||_{uloc q}
    and reports the empirical constant C in the form
    ||grad K * f||_{uloc p} = C (||K'||_1 + ||K'||_r) ||f||_{uloc q}.
    """
    if field.grid.dim != 1:
        raise PreconditionError("the Young-type check is implemented in one dimension")
    for exponent in (p, q, r):
        _check_exponent(exponent)
    if not q <= p:
        raise PreconditionError(f"need q <= p, got p={p}, q={q}")
    if math.isinf(r):
        raise PreconditionError("in one dimension r must be finite")
    if abs(1.0 + _reciprocal(p) - _reciprocal(q) - _reciprocal(r)) > SCALING_TOLERANCE:
        raise PreconditionError(f"exponents violate 1 + 1/p = 1/q + 1/r: p={p}, q={q}, r={r}")

    kernel_l1 = grad_kernel_lr_norm_1d(1.0)
    kernel_lr = grad_kernel_lr_norm_1d(r)
    lhs = uloc_norm(grad_K_conv(field)[0], NormSpec(p=p))
    data = uloc_norm(field, NormSpec(p=q))
    constant = YOUNG_BALL_FACTOR * kernel_l1 + YOUNG_KERNEL_FACTOR * kernel_lr
    rhs = constant * data
    empirical = lhs / ((kernel_l1 + kernel_lr) * data) if data > 0 else 0.0
    passed = lhs <= rhs * (1.0 + INEQUALITY_SLACK)
    return InequalityReport(
        "young_uloc", lhs=lhs, rhs=rhs, passed=passed, constant=constant, empirical_constant=empirical
    )


def heat_propagate(field: RealField, t: float) -> RealField:
    """Exact spectral heat flow exp(t Laplacian)."""
    if t < 0:
        raise PreconditionError(f"heat time must be non-negative, got {t}")
    return apply_multiplier(field, np.exp(-t * field.grid.k_squared))


def heat_uloc_spotcheck(
    field: RealField, p: float, q: float, t: float, max_constant: float = 10.0
) -> InequalityReport:
    """Uniformly local smoothing of the heat flow.

    For p = q the flow must contract with constant 1. For q < p the ratio
    ||e^{t Lap} f||_{uloc p} / ((1 + t^{-(n/2)(1/q - 1/p)}) ||f||_{uloc q})
    is reported as the empirical constant and must not exceed max_constant.
    """
    _check_exponent(p)
    _check_exponent(q)
    if not q <= p:
        raise PreconditionError(f"need q <= p, got p={p}, q={q}")
    if t <= 0:
        raise PreconditionError(f"heat time must be positive, got {t}")
    lhs = uloc_norm(heat_propagate(field, t), NormSpec(p=p))
    data = uloc_norm(field, NormSpec(p=q))
    if p == q:
        passed = lhs <= data * (1.0 + INEQUALITY_SLACK)
        ratio = lhs / data if data > 0 else 0.0
        return InequalityReport(
            "heat_uloc_contraction", lhs=lhs, rhs=data, passed=passed, constant=1.0,
            empirical_constant=ratio,
        )
    factor = 1.0 + t ** (-(field.grid.dim / 2.0) * (1.0 / q - _reciprocal(p)))
    rhs = factor * data
    ratio = lhs / rhs if rhs > 0 else 0.0
    return InequalityReport(
        "heat_uloc_smoothing", lhs=lhs, rhs=rhs, passed=ratio <= max_constant,
        constant=max_constant, empirical_constant=ratio,
    )


def covering_count(grid: Grid, rho_small: float, rho_large: float, shape: WindowShape) -> int:
    """Number of small windows needed to cover one large window on the node lattice."""
    small = _window_offsets(grid, rho_small)
    large = _window_offsets(grid, rho_large)
    count = 1
    for r_small, r_large in zip(small, large):
        # cubes of half-side s inscribed in a small ball still sit inside it
        side = r_small if shape is WindowShape.CUBE or grid.dim == 1 else int(r_small / math.sqrt(2))
        count *= math.ceil((2 * r_large + 1) / (2 * side + 1))
    return count


def check_window_equivalence(
    field: RealField,
    p: float,
    rho_small: float,
    rho_large: float,
    shape: WindowShape = WindowShape.BALL,
) -> InequalityReport:
    """||f||_{uloc p, rho_small} <= ||f||_{uloc p, rho_large} <= m ||f||_{uloc p, rho_small}.

    m is the covering count of a large window by small ones.
    """
    if not rho_small < rho_large:
        raise PreconditionError(f"need rho_small < rho_large, got {rho_small}, {rho_large}")
    small = uloc_norm(field, NormSpec(p=p, window_radius=rho_small, window_shape=shape))
    large = uloc_norm(field, NormSpec(p=p, window_radius=rho_large, window_shape=shape))
    m = covering_count(field.grid, rho_small, rho_large, shape)
    slack = 1.0 + SCALING_TOLERANCE
    passed = small <= large * slack and large <= m * small * slack
    return InequalityReport(
        "window_equivalence", lhs=small, mid=large, rhs=m * small, passed=passed, constant=float(m)
    )
