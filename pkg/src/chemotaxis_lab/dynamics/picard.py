"""Picard iteration of the Duhamel (mild) formulation.

    v(t) = S_A(t) v0 - integral_0^t grad S_A(t - s) . (v(s) grad K*v(s)) ds

The integral is a composite trapezoid over M equal substeps of [0, T] with
the semigroup factor applied as an exact multiplier at every node. On a
lattice i k exp(-(t - s) h(k)) is bounded, so the trapezoid needs no
singular weights.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..analysis.semigroup import semigroup_symbol
from ..errors import PreconditionError
from ..spectral.grid import RealField, physical_array, spectral_array
from .solver import flux_divergence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PicardResult:
    """Iterates on the quadrature nodes and their successive distances.

    Attributes:
        times: Quadrature nodes 0 = t_0 < ... < t_M = T
        iterates: Each iterate as an array of shape (M + 1, *grid.shape)
        distances: sup over nodes of ||v^{m+1}(t_j) - v^m(t_j)||_p
        contraction_ratios: distances[m] / distances[m - 1]
        final: Last iterate at t = T
        converged: Stopped because the distance fell below tol
    """

    times: np.ndarray
    iterates: tuple[np.ndarray, ...]
    distances: tuple[float, ...]
    contraction_ratios: tuple[float, ...]
    final: RealField
    converged: bool

    @property
    def contracted(self) -> bool:
        """True when every iterate is finite and every ratio after the first is below 1."""
        if not all(math.isfinite(d) for d in self.distances):
            return False
        return all(ratio < 1.0 for ratio in self.contraction_ratios[1:])

    @property
    def max_ratio(self) -> float:
        return max(self.contraction_ratios, default=0.0)


def _node_norm(values: np.ndarray, p: float, cell_volume: float) -> float:
    magnitude = np.abs(values)
    if math.isinf(p):
        return float(np.max(magnitude))
    return float((np.sum(magnitude**p) * cell_volume) ** (1.0 / p))


def picard_solve(
    A: float,
    v0: RealField,
    T: float,
    max_iter: int = 30,
    substeps: int = 64,
    tol: float = 1e-12,
    p: float = 2.0,
    dealias: bool = True,
) -> PicardResult:
    """Iterate the mild-solution map from v^0(t) = S_A(t) v0.

    Args:
        A: Background constant
        v0: Initial perturbation
        T: Horizon; the map contracts only for small T
        max_iter: Iteration cap
        substeps: Trapezoid substeps M
        tol: Stop when a distance drops below tol times the iterate size
        p: Norm used for distances
        dealias: Truncate the quadratic flux as the ETD solver does

    Returns:
        The iteration record. Non-contraction is reported, never raised.
    """
    if T <= 0:
        raise PreconditionError(f"Picard horizon must be positive, got {T}")
    if substeps < 2:
        raise PreconditionError(f"need at least 2 substeps, got {substeps}")
    grid = v0.grid
    cell = grid.cell_volume
    times = np.linspace(0.0, T, substeps + 1)
    step = T / substeps
    symbol = semigroup_symbol(A, grid)
    # propagators[d] = exp(-d * step * h)
    propagators = np.stack([symbol.multiplier(d * step) for d in range(substeps + 1)])
    free = propagators * spectral_array(v0.values)

    current = free
    spatial = tuple(range(1, grid.dim + 1))
    iterates = [physical_array(current, axes=spatial)]
    distances: list[float] = []
    ratios: list[float] = []
    converged = False
    for iteration in range(max_iter):
        flux = np.stack([flux_divergence(c, grid, dealias) for c in current])
        updated = free.copy()
        for j in range(1, substeps + 1):
            weights = np.full(j + 1, step)
            weights[0] = weights[-1] = 0.5 * step
            lags = j - np.arange(j + 1)
            duhamel = np.tensordot(weights, propagators[lags] * flux[: j + 1], axes=1)
            updated[j] = free[j] - duhamel
        values = physical_array(updated, axes=spatial)

        if not np.all(np.isfinite(values)):
            distances.append(math.inf)
            ratios.append(math.inf)
            logger.warning(f"Picard iterate {iteration + 1} is not finite; T={T:g} is too large")
            break

        previous = iterates[-1]
        distance = max(_node_norm(values[j] - previous[j], p, cell) for j in range(substeps + 1))
        size = max(_node_norm(values[j], p, cell) for j in range(substeps + 1))
        iterates.append(values)
        if distances:
            ratios.append(distance / distances[-1] if distances[-1] > 0 else math.inf)
        distances.append(distance)
        current = updated
        if distance <= tol * max(size, np.finfo(float).tiny):
            converged = True
            break

    result = PicardResult(
        times=times,
        iterates=tuple(iterates),
        distances=tuple(distances),
        contraction_ratios=tuple(ratios),
        final=RealField(grid, iterates[-1][-1]),
        converged=converged,
    )
    if not result.contracted:
        logger.warning(
            f"Picard map did not contract on [0, {T:g}]: max ratio {result.max_ratio:.3g}"
        )
    return result
