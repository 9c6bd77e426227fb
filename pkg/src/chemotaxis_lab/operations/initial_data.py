"""Grids and initial fields built from experiment configs.

Randomized fields draw from a named stream of the config seed, so adding a
new consumer never shifts the numbers another one sees.
"""

from __future__ import annotations

import logging
import math
import zlib

import numpy as np

from ..analysis.norms import lp_norm
from ..analysis.semigroup import build_near_eigenmode, peak_wavenumber, wave_packet
from ..errors import PreconditionError
from ..models.config import (
    CombData,
    ConstantData,
    ExperimentConfig,
    GaussianData,
    GridSpec,
    InitialData,
    PacketData,
    RandomData,
)
from ..spectral.grid import Grid, RealField, make_grid, physical_array, spectral_array

logger = logging.getLogger(__name__)


def named_rng(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for one named consumer of a seed."""
    sequence = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(stream.encode("utf-8")),))
    return np.random.default_rng(sequence)


def resonant_extent(A: float, modes: int) -> float:
    """Box length whose lattice mode `modes` sits exactly at the peak wavenumber."""
    return 2.0 * math.pi * modes / peak_wavenumber(A)


def build_grid(spec: GridSpec, A: float = 0.0) -> Grid:
    extent = spec.extent
    if spec.resonant_modes is not None and A > 1.0:
        length = resonant_extent(A, spec.resonant_modes)
        extent = [length] * spec.dim if not isinstance(extent, list) else [length, *extent[1:]]
    return make_grid(spec.dim, extent, spec.points)


def grid_for(config: ExperimentConfig) -> Grid:
    return build_grid(config.grid, config.A)


def _periodic_offset(x: np.ndarray, center: float, length: float) -> np.ndarray:
    return np.mod(x - center + 0.5 * length, length) - 0.5 * length


def gaussian_bump(
    grid: Grid, width: float, amplitude: float = 1.0, center: float | list[float] = 0.0
) -> RealField:
    centers = center if isinstance(center, list) else [center] * grid.dim
    if len(centers) != grid.dim:
        raise PreconditionError(f"gaussian center needs {grid.dim} entries, got {len(centers)}")
    radius2 = np.zeros(grid.shape)
    for x, c, length in zip(grid.coordinates(), centers, grid.extent):
        radius2 = radius2 + _periodic_offset(x, c, length) ** 2
    return RealField(grid, amplitude * np.exp(-radius2 / (2.0 * width**2)))


def periodic_comb(grid: Grid, period: float, width: float, amplitude: float) -> RealField:
    """Identical bumps at every point of the lattice period * Z^n."""
    for length in grid.extent:
        if abs(length / period - round(length / period)) > 1e-9:
            logger.warning(f"box extent {length} is not a multiple of the comb period {period}")
    values = np.full(grid.shape, amplitude, dtype=np.float64)
    for x in grid.coordinates():
        values = values * np.exp(-_periodic_offset(x, 0.0, period) ** 2 / (2.0 * width**2))
    return RealField(grid, values)


def smooth_random_field(
    grid: Grid, rng: np.random.Generator, amplitude: float, max_mode: int
) -> RealField:
    """Mean-zero field of lattice modes |m| <= max_mode on every axis, scaled to max |v| = amplitude."""
    limit = min(grid.points) // 3
    if max_mode >= limit:
        raise PreconditionError(f"max_mode must stay below N/3 = {limit}, got {max_mode}")
    coefficients = spectral_array(rng.standard_normal(grid.shape))
    band = np.meshgrid(*(np.abs(m) <= max_mode for m in grid.lattice_indices), indexing="ij")
    keep = np.logical_and.reduce(band)
    keep.flat[0] = False
    values = physical_array(coefficients * keep)
    peak = float(np.max(np.abs(values)))
    return RealField(grid, values * (amplitude / peak if peak > 0 else 0.0))


def build_initial_field(
    descriptor: InitialData, grid: Grid, A: float, seed: int = 0, stream: str = "initial"
) -> RealField:
    """Turn an initial-data descriptor into a field on the grid."""
    if isinstance(descriptor, GaussianData):
        bump = gaussian_bump(grid, descriptor.width, descriptor.amplitude, descriptor.center)
        if descriptor.mass is None:
            return bump
        return (descriptor.mass / bump.integral()) * bump
    if isinstance(descriptor, PacketData):
        if descriptor.k is None:
            return build_near_eigenmode(
                A, descriptor.amplitude, descriptor.width, grid, descriptor.center, descriptor.l2_norm
            )
        packet = wave_packet(grid, descriptor.k, descriptor.width, descriptor.amplitude, descriptor.center)
        if descriptor.l2_norm is None:
            return packet
        return (descriptor.l2_norm / lp_norm(packet, 2.0)) * packet
    if isinstance(descriptor, CombData):
        return periodic_comb(grid, descriptor.period, descriptor.width, descriptor.amplitude)
    if isinstance(descriptor, ConstantData):
        return RealField(grid, np.full(grid.shape, descriptor.value))
    if isinstance(descriptor, RandomData):
        rng = named_rng(seed, stream)
        return smooth_random_field(grid, rng, descriptor.amplitude, descriptor.max_mode)
    raise PreconditionError(f"unknown initial data kind: {descriptor!r}")
