"""Shared fixtures: grids, a seeded generator and small experiment configs."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from chemotaxis_lab.models.config import (
    ExperimentConfig,
    ExperimentKind,
    Formulation,
    GaussianData,
    GridSpec,
    SolverConfig,
)
from chemotaxis_lab.operations.initial_data import smooth_random_field
from chemotaxis_lab.spectral.grid import Grid, RealField, make_grid


@pytest.fixture
def grid_1d() -> Grid:
    return make_grid(1, 64.0, 256)


@pytest.fixture
def grid_2d() -> Grid:
    return make_grid(2, 32.0, 64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def smooth_field(rng: np.random.Generator) -> Callable[..., RealField]:
    """Factory for band-limited mean-zero random fields."""

    def factory(grid: Grid, amplitude: float = 0.1, max_mode: int = 8) -> RealField:
        return smooth_random_field(grid, rng, amplitude, max_mode)

    return factory


@pytest.fixture
def tiny_evolve_config() -> ExperimentConfig:
    """A raw-formulation run that finishes in well under a second."""
    return ExperimentConfig(
        name="tiny-evolve",
        kind=ExperimentKind.EVOLVE,
        A=0.0,
        grid=GridSpec(extent=16.0, points=64),
        initial=GaussianData(width=1.0, amplitude=0.1),
        solver=SolverConfig(horizon=0.2, formulation=Formulation.RAW, save_every=5),
    )
