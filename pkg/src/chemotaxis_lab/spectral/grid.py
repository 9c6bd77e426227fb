"""Periodic grids, fields and the Fourier transform pair.

Public API (the "studs"):
    Grid: immutable periodic box with cached wavenumber tables
    make_grid: validated grid construction
    RealField, SpectralField: immutable node values and Fourier coefficients
    forward_transform, inverse_transform: the FFT pair on fields
    spectral_gradient, spectral_divergence, spectral_laplacian: Fourier derivatives
    apply_multiplier, spectral_energy: multiplier helpers

Node j along an axis of extent L with N points sits at x_j = -L/2 + j*L/N.
Lattice wavenumbers are k = 2*pi*m/L with m in [-N/2, N/2). The unpaired
Nyquist mode m = -N/2 is zeroed in first-derivative multipliers so that odd
symbols keep real fields real.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as sp_fft

from ..errors import PreconditionError

logger = logging.getLogger(__name__)

SUPPORTED_DIMS = (1, 2)
MIN_POINTS = 8


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Grid:
    """Periodic box [-L/2, L/2)^n sampled with N points per axis."""

    dim: int
    extent: tuple[float, ...]
    points: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return math.prod(self.points)

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        return tuple(length / count for length, count in zip(self.extent, self.points))

    @cached_property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @cached_property
    def volume(self) -> float:
        return math.prod(self.extent)

    @cached_property
    def fundamental(self) -> float:
        """Smallest nonzero lattice wavenumber over all axes."""
        return min(2.0 * np.pi / length for length in self.extent)

    @cached_property
    def lattice_indices(self) -> tuple[np.ndarray, ...]:
        """Integer mode numbers m per axis in FFT order."""
        return tuple(
            _frozen(np.rint(sp_fft.fftfreq(count, d=1.0 / count)).astype(np.int64))
            for count in self.points
        )

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return tuple(
            _frozen(2.0 * np.pi * modes / length)
            for modes, length in zip(self.lattice_indices, self.extent)
        )

    @cached_property
    def k_vectors(self) -> tuple[np.ndarray, ...]:
        """Broadcast wavenumber arrays, one per axis, each of the grid shape."""
        return tuple(
            _frozen(np.ascontiguousarray(axis))
            for axis in np.meshgrid(*self.wavenumbers, indexing="ij")
        )

    @cached_property
    def k_squared(self) -> np.ndarray:
        return _frozen(sum(k * k for k in self.k_vectors))

    @cached_property
    def derivative_k(self) -> tuple[np.ndarray, ...]:
        """Wavenumber arrays with the Nyquist plane zeroed along each axis."""
        tables = []
        for axis, k in enumerate(self.k_vectors):
            table = np.array(k)
            nyquist = self.lattice_indices[axis] == -(self.points[axis] // 2)
            index = [slice(None)] * self.dim
            index[axis] = nyquist
            table[tuple(index)] = 0.0
            tables.append(_frozen(table))
        return tuple(tables)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule: keep modes with |m| < N/3 on every axis."""
        masks = [np.abs(modes) < count / 3.0 for modes, count in zip(self.lattice_indices, self.points)]
        mesh = np.meshgrid(*masks, indexing="ij")
        return _frozen(np.logical_and.reduce(mesh))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        length, count = self.extent[axis], self.points[axis]
        return -0.5 * length + np.arange(count) * (length / count)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Node coordinates as broadcast arrays of the grid shape."""
        return tuple(np.meshgrid(*(self.axis_coordinates(a) for a in range(self.dim)), indexing="ij"))

    def describe(self) -> dict[str, object]:
        return {"dim": self.dim, "extent": list(self.extent), "points": list(self.points)}


def make_grid(dim: int, extent: float | Sequence[float], points: int | Sequence[int]) -> Grid:
    """Build a validated periodic grid.

    Args:
        dim: Spatial dimension, 1 or 2
        extent: Box length, scalar or one per axis
        points: Nodes per axis, scalar or one per axis; even and at least 8

    Returns:
        The grid.

    Raises:
        PreconditionError: Listing every violated requirement.
    """
    errors: list[str] = []
    if dim not in SUPPORTED_DIMS:
        raise PreconditionError(f"dim must be one of {SUPPORTED_DIMS}, got {dim}")

    extents = tuple(float(e) for e in (extent if isinstance(extent, Sequence) else [extent] * dim))
    counts = tuple(int(n) for n in (points if isinstance(points, Sequence) else [points] * dim))

    if len(extents) != dim:
        errors.append(f"extent needs {dim} entries, got {len(extents)}")
    if len(counts) != dim:
        errors.append(f"points needs {dim} entries, got {len(counts)}")
    for length in extents:
        if not math.isfinite(length) or length <= 0:
            errors.append(f"extent must be positive and finite, got {length}")
    for count in counts:
        if count < MIN_POINTS:
            errors.append(f"points must be at least {MIN_POINTS}, got {count}")
        if count % 2:
            errors.append(f"points must be even, got {count}")

    if errors:
        raise PreconditionError("; ".join(errors))
    return Grid(dim=dim, extent=extents, points=counts)


def _check_same_grid(left: Grid, right: Grid) -> None:
    if left != right:
        raise PreconditionError("fields live on different grids")


@dataclass(frozen=True, eq=False)
class RealField:
    """Finite real node values on a grid. Values are copied and made read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise PreconditionError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("field contains non-finite values")
        object.__setattr__(self, "values", _frozen(values))

    def __add__(self, other: RealField | float) -> RealField:
        if isinstance(other, RealField):
            _check_same_grid(self.grid, other.grid)
            return RealField(self.grid, self.values + other.values)
        return RealField(self.grid, self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other: RealField | float) -> RealField:
        if isinstance(other, RealField):
            _check_same_grid(self.grid, other.grid)
            return RealField(self.grid, self.values - other.values)
        return RealField(self.grid, self.values - float(other))

    def __mul__(self, scalar: float) -> RealField:
        return RealField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> RealField:
        return RealField(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients in unnormalized FFT order."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coefficients = np.array(self.coefficients, dtype=np.complex128)
        if coefficients.shape != self.grid.shape:
            raise PreconditionError(
                f"coefficient shape {coefficients.shape} does not match grid {self.grid.shape}"
            )
        object.__setattr__(self, "coefficients", _frozen(coefficients))

    def hermitian_defect(self) -> float:
        """Largest |c(-m) - conj(c(m))| over the lattice."""
        mirrored = np.conj(self.coefficients)
        for axis in range(self.grid.dim):
            mirrored = np.roll(np.flip(mirrored, axis=axis), 1, axis=axis)
        return float(np.max(np.abs(self.coefficients - mirrored)))


def spectral_array(values: np.ndarray, axes: tuple[int, ...] | None = None) -> np.ndarray:
    return sp_fft.fftn(values, axes=axes, workers=1)


def physical_array(coefficients: np.ndarray, axes: tuple[int, ...] | None = None) -> np.ndarray:
    return sp_fft.ifftn(coefficients, axes=axes, workers=1).real


def forward_transform(field: RealField) -> SpectralField:
    return SpectralField(field.grid, spectral_array(field.values))


def inverse_transform(spectrum: SpectralField) -> RealField:
    """Inverse FFT. The imaginary part left by a non-Hermitian input is dropped."""
    return RealField(spectrum.grid, physical_array(spectrum.coefficients))


def apply_multiplier(field: RealField, table: np.ndarray) -> RealField:
    """Apply a Fourier multiplier table of the grid shape."""
    return RealField(field.grid, physical_array(table * spectral_array(field.values)))


def spectral_gradient(field: RealField) -> tuple[RealField, ...]:
    coefficients = spectral_array(field.values)
    return tuple(
        RealField(field.grid, physical_array(1j * k * coefficients)) for k in field.grid.derivative_k
    )


def spectral_divergence(components: Sequence[RealField]) -> RealField:
    grid = components[0].grid
    if len(components) != grid.dim:
        raise PreconditionError(f"divergence needs {grid.dim} components, got {len(components)}")
    total = np.zeros(grid.shape, dtype=np.complex128)
    for component, k in zip(components, grid.derivative_k):
        _check_same_grid(grid, component.grid)
        total += 1j * k * spectral_array(component.values)
    return RealField(grid, physical_array(total))


def spectral_laplacian(field: RealField) -> RealField:
    return apply_multiplier(field, -field.grid.k_squared)


def spectral_energy(spectrum: SpectralField) -> float:
    """Squared L2 norm of the field behind the coefficients (Parseval)."""
    grid = spectrum.grid
    return float(np.sum(np.abs(spectrum.coefficients) ** 2) * grid.cell_volume / grid.size)
