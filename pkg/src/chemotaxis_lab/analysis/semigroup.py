"""The linearized semigroup S_A(t) around the constant state A.

Perturbations v = u - A of the steady state solve v_t = Lv - div(v grad K*v)
with L = Laplacian - A Laplacian K*. L is the Fourier multiplier -h(k),

    h(k) = |k|^2 - A |k|^2 / (1 + |k|^2),

so S_A(t) = exp(tL) multiplies coefficients by exp(-t h(k)). The spectral
abscissa sup(-h) is 0 for A <= 1 and (sqrt(A) - 1)^2 for A > 1.

Public API (the "studs"):
    dispersion_rate, spectral_abscissa, peak_wavenumber: continuum formulas
    SemigroupSymbol, semigroup_symbol: cached lattice tables
    apply_semigroup, apply_grad_semigroup, apply_linear_operator: exact evolution
    semigroup_decay_probe, mu_l1_probe: measured decay and kernel bounds
    build_near_eigenmode, wave_packet: approximate eigenvectors at the peak
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import BoundaryContaminationError, PreconditionError
from ..spectral.grid import Grid, RealField, apply_multiplier, physical_array, spectral_array
from .fitting import RateFit, fit_power_law
from .norms import lp_norm

logger = logging.getLogger(__name__)

CONTAMINATION_LIMIT = 0.01
MU_BOUNDARY_LIMIT = 1e-6
BOUNDARY_SHELL = 0.4  # |x_j| >= 0.4 L_j is the outer fifth of the box
TRANSIENT_FRACTION = 0.2


def _as_output(values: np.ndarray) -> float | np.ndarray:
    return float(values) if values.ndim == 0 else values


def dispersion_rate(A: float, k: float | np.ndarray) -> float | np.ndarray:
    """Linear growth rate -h(k) of the mode with wavenumber magnitude |k|."""
    k2 = np.square(np.asarray(k, dtype=np.float64))
    return _as_output(-k2 + A * k2 / (1.0 + k2))


def spectral_abscissa(A: float) -> float:
    """Supremum of the dispersion relation: (sqrt(A) - 1)^2 above A = 1, else 0."""
    if A <= 1.0:
        return 0.0
    return (math.sqrt(A) - 1.0) ** 2


def peak_wavenumber(A: float) -> float:
    """Wavenumber magnitude sqrt(sqrt(A) - 1) where -h attains the abscissa."""
    if A <= 1.0:
        raise PreconditionError(f"no growing mode exists for A <= 1, got A={A}")
    return math.sqrt(math.sqrt(A) - 1.0)


@dataclass(frozen=True, eq=False)
class SemigroupSymbol:
    """h(k) tabulated on a grid's lattice."""

    A: float
    grid: Grid
    h_table: np.ndarray

    def multiplier(self, t: float) -> np.ndarray:
        return np.exp(-t * self.h_table)

    def gradient_multipliers(self, t: float) -> tuple[np.ndarray, ...]:
        decay = self.multiplier(t)
        return tuple(1j * k * decay for k in self.grid.derivative_k)

    @property
    def lattice_max_rate(self) -> float:
        return float(np.max(-self.h_table))


@lru_cache(maxsize=64)
def semigroup_symbol(A: float, grid: Grid) -> SemigroupSymbol:
    k2 = grid.k_squared
    table = k2 - A * k2 / (1.0 + k2)
    table.flags.writeable = False
    return SemigroupSymbol(A=float(A), grid=grid, h_table=table)


def lattice_max_rate(A: float, grid: Grid) -> float:
    """Largest growth rate -h(k) over the lattice; never above the abscissa."""
    return semigroup_symbol(A, grid).lattice_max_rate


def lattice_gap(grid: Grid) -> float:
    """Resolution slack between lattice and continuum rates: the squared lattice spacing."""
    return max(2.0 * math.pi / length for length in grid.extent) ** 2


def _check_time(t: float) -> None:
    if t < 0:
        raise PreconditionError(f"semigroup time must be non-negative, got {t}")


def apply_semigroup(A: float, t: float, v0: RealField) -> RealField:
    _check_time(t)
    if t == 0:
        return v0
    return apply_multiplier(v0, semigroup_symbol(A, v0.grid).multiplier(t))


def apply_grad_semigroup(A: float, t: float, v0: RealField) -> tuple[RealField, ...]:
    _check_time(t)
    coefficients = spectral_array(v0.values)
    return tuple(
        RealField(v0.grid, physical_array(symbol * coefficients))
        for symbol in semigroup_symbol(A, v0.grid).gradient_multipliers(t)
    )


def apply_linear_operator(A: float, v: RealField) -> RealField:
    """Lv = Laplacian v - A Laplacian K*v, the generator of S_A."""
    return apply_multiplier(v, -semigroup_symbol(A, v.grid).h_table)


def eigenmode_residual(A: float, v: RealField) -> float:
    """||Lv - a v||_2 / ||v||_2 with a the spectral abscissa."""
    residual = apply_linear_operator(A, v) - spectral_abscissa(A) * v
    return lp_norm(residual, 2.0) / lp_norm(v, 2.0)


def eigenmode_deviation(A: float, v0: RealField, t: float) -> float:
    """||S_A(t)v0 - exp(a t) v0||_2 / ||v0||_2."""
    evolved = apply_semigroup(A, t, v0)
    return lp_norm(evolved - math.exp(spectral_abscissa(A) * t) * v0, 2.0) / lp_norm(v0, 2.0)


def boundary_mass_fraction(field: RealField) -> float:
    """Share of the integral of |f| lying in the outer fifth of the box along any axis."""
    grid = field.grid
    weight = np.abs(field.values)
    total = float(np.sum(weight))
    if total == 0.0:
        return 0.0
    outer = np.zeros(grid.shape, dtype=bool)
    for x, length in zip(grid.coordinates(), grid.extent):
        outer |= np.abs(x) >= BOUNDARY_SHELL * length
    return float(np.sum(weight[outer])) / total


def reference_decay_exponent(dim: int, p: float, q: float, gradient: bool = False) -> float:
    """-(n/2)(1/q - 1/p), less one half for the gradient."""
    exponent = -(dim / 2.0) * (1.0 / q - (0.0 if math.isinf(p) else 1.0 / p))
    return exponent - 0.5 if gradient else exponent


def _gradient_magnitude(A: float, t: float, v0: RealField) -> RealField:
    components = apply_grad_semigroup(A, t, v0)
    return RealField(v0.grid, np.sqrt(sum(c.values**2 for c in components)))


def semigroup_decay_probe(
    A: float,
    p: float,
    q: float,
    v0: RealField,
    times: Sequence[float] | np.ndarray,
    window: tuple[float | None, float | None] | None = None,
    gradient: bool = False,
) -> RateFit:
    """Fit the algebraic decay exponent of ||S_A(t)v0||_p (or of its gradient).

    Args:
        A: Background constant, below the threshold 1
        p: Norm measured along the evolution
        q: Norm class of the data; only checked, the caller compares the
            exponent with reference_decay_exponent
        v0: Localized initial perturbation
        times: Sample times, positive and increasing
        window: Fit window; by default the first 20% of the span is dropped
            and the window ends before boundary mass exceeds 1%
        gradient: Measure |grad S_A(t)v0| instead of S_A(t)v0

    Returns:
        Algebraic RateFit.

    Raises:
        PreconditionError: A >= 1, exponents out of order, bad times
        BoundaryContaminationError: A requested window reaches contaminated times
    """
    if A >= 1.0:
        raise PreconditionError(f"decay probe needs A < 1, got A={A}")
    if not 1.0 <= q <= p:
        raise PreconditionError(f"decay probe needs 1 <= q <= p, got p={p}, q={q}")
    t = np.asarray(times, dtype=np.float64)
    if t.size < 3 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise PreconditionError("times must be positive, strictly increasing and at least 3")

    values = np.empty_like(t)
    contamination = np.empty_like(t)
    for i, ti in enumerate(t):
        evolved = apply_semigroup(A, float(ti), v0)
        contamination[i] = boundary_mass_fraction(evolved)
        measured = _gradient_magnitude(A, float(ti), v0) if gradient else evolved
        values[i] = lp_norm(measured, p)

    if window is None:
        clean = t[contamination <= CONTAMINATION_LIMIT]
        if clean.size == 0:
            raise BoundaryContaminationError(
                "boundary contamination above 1% at every sample time",
                float(contamination[0]),
                float(t[0]),
            )
        lo = t[0] + TRANSIENT_FRACTION * (t[-1] - t[0])
        dirty = t[contamination > CONTAMINATION_LIMIT]
        hi = float(dirty[0]) * (1.0 - 1e-12) if dirty.size else float(t[-1])
        fit_window: tuple[float | None, float | None] = (float(lo), hi)
    else:
        lo, hi = window
        inside = np.ones(t.shape, dtype=bool)
        if lo is not None:
            inside &= t >= lo
        if hi is not None:
            inside &= t <= hi
        worst = np.flatnonzero(inside & (contamination > CONTAMINATION_LIMIT))
        if worst.size:
            index = int(worst[0])
            raise BoundaryContaminationError(
                f"boundary mass fraction {contamination[index]:.3g} exceeds 1% at t={t[index]:g}",
                float(contamination[index]),
                float(t[index]),
            )
        fit_window = (lo, hi)

    fit = fit_power_law(t, values, fit_window)
    logger.debug(f"decay probe A={A} p={p} gradient={gradient}: exponent {fit.exponent:.4f}")
    return fit


def wave_packet(
    grid: Grid, k: float, width: float, amplitude: float, center: float = 0.0
) -> RealField:
    """Mean-zero Gaussian-envelope plane wave along the first axis."""
    shortest = min(grid.extent)
    if 10.0 * width > shortest:
        raise PreconditionError(
            f"packet width {width} does not fit the box: need 10*width <= {shortest} on every axis"
        )
    coords = grid.coordinates()
    envelope = np.ones(grid.shape)
    for x, length in zip(coords, grid.extent):
        offset = np.mod(x - center + 0.5 * length, length) - 0.5 * length
        envelope = envelope * np.exp(-(offset**2) / (2.0 * width**2))
    phase = np.mod(coords[0] - center + 0.5 * grid.extent[0], grid.extent[0]) - 0.5 * grid.extent[0]
    values = amplitude * envelope * np.cos(k * phase)
    return RealField(grid, values - np.mean(values))


def build_near_eigenmode(
    A: float,
    amplitude: float,
    width: float,
    grid: Grid,
    center: float = 0.0,
    l2_norm: float | None = None,
) -> RealField:
    """Wave packet at the peak wavenumber, an approximate eigenvector for the abscissa.

    Args:
        A: Background constant above the threshold 1
        amplitude: Envelope height (ignored when l2_norm is given)
        width: Envelope standard deviation; large width means a sharp spectral peak
        grid: Target grid
        center: Envelope centre on the first axis
        l2_norm: Rescale the packet to this L2 norm

    Returns:
        The packet.
    """
    k_star = peak_wavenumber(A)
    if width * k_star < 5.0:
        logger.warning(
            f"packet width {width} is not large against 1/k*={1.0 / k_star:.3g}; "
            "its spectrum is broad"
        )
    packet = wave_packet(grid, k_star, width, amplitude, center)
    if l2_norm is None:
        return packet
    return (l2_norm / lp_norm(packet, 2.0)) * packet


def mu_l1_probe(A: float, times: Sequence[float] | np.ndarray, grid: Grid) -> np.ndarray:
    """L1 norm of the kernel mu_A(t) of S_A(t) at each time.

    The kernel is the inverse transform of exp(-t h) divided by the cell
    volume, so its L1 quadrature is the plain sum of |ifft(exp(-t h))|.
    """
    if not 0.0 <= A < 1.0:
        raise PreconditionError(f"kernel probe needs 0 <= A < 1, got A={A}")
    t = np.asarray(times, dtype=np.float64)
    if np.any(t < 1.0):
        raise PreconditionError("kernel probe times must be >= 1")
    symbol = semigroup_symbol(A, grid)
    norms = np.empty_like(t)
    for i, ti in enumerate(t):
        kernel = np.fft.fftshift(physical_array(symbol.multiplier(float(ti))))
        norms[i] = float(np.sum(np.abs(kernel)))
        centred = RealField(grid, kernel)
        fraction = boundary_mass_fraction(centred)
        if fraction > MU_BOUNDARY_LIMIT:
            logger.warning(
                f"mu_A kernel at t={ti:g} has {fraction:.2e} of its mass near the box edge; "
                "enlarge the box"
            )
    return norms
