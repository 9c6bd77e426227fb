"""Named experiment presets.

Each preset is a complete, seeded configuration for one acceptance
experiment. `ks-lab verify` runs all of them; the subcommands default to
the preset of their kind.
"""

from __future__ import annotations

import math

from .config import (
    CombData,
    ConsistencyParams,
    DecayParams,
    ExperimentConfig,
    ExperimentKind,
    FitWindow,
    Formulation,
    GaussianData,
    GridSpec,
    NormSpec,
    PacketData,
    PicardParams,
    RandomData,
    SolverConfig,
    SweepParams,
)

# Box for the sub-threshold sweep control: 64 periods of the unit wavenumber.
CONTROL_EXTENT = 2.0 * math.pi * 64

_PRESETS: list[ExperimentConfig] = [
    ExperimentConfig(
        name="abscissa",
        kind=ExperimentKind.DISPERSION,
        A=2.0,
        grid=GridSpec(extent=64.0, points=256),
    ),
    ExperimentConfig(
        name="operator-suite",
        kind=ExperimentKind.OPERATOR_SUITE,
        grid=GridSpec(extent=64.0, points=256),
        seed=7,
    ),
    ExperimentConfig(
        name="decay-1d",
        kind=ExperimentKind.DECAY,
        A=0.5,
        grid=GridSpec(extent=409.6, points=4096),
        initial=GaussianData(width=0.5, mass=1.0),
        fit_window=FitWindow(t_min=5.0, t_max=200.0),
        decay=DecayParams(p=math.inf, q=1.0, t_start=5.0, t_end=200.0, samples=40),
    ),
    ExperimentConfig(
        name="decay-2d",
        kind=ExperimentKind.DECAY,
        A=0.9,
        grid=GridSpec(dim=2, extent=512.0, points=256),
        initial=GaussianData(width=4.0, mass=1.0),
        fit_window=FitWindow(t_min=1000.0, t_max=20000.0),
        decay=DecayParams(
            p=2.0, q=1.0, t_start=1000.0, t_end=20000.0, samples=20, tolerance=0.1, heat_control=False
        ),
    ),
    ExperimentConfig(
        name="growth-a2",
        kind=ExperimentKind.GROWTH,
        A=2.0,
        grid=GridSpec(points=2048, resonant_modes=64),
        initial=PacketData(width=30.0, amplitude=1e-5),
        solver=SolverConfig(horizon=120.0, save_every=200),
    ),
    ExperimentConfig(
        name="growth-a4",
        kind=ExperimentKind.GROWTH,
        A=4.0,
        grid=GridSpec(points=2048, resonant_modes=64),
        initial=PacketData(width=20.0, amplitude=1e-4),
        solver=SolverConfig(horizon=30.0, save_every=200),
    ),
    ExperimentConfig(
        name="delta-sweep-a2",
        kind=ExperimentKind.DELTA_SWEEP,
        A=2.0,
        grid=GridSpec(points=2048, resonant_modes=64),
        initial=PacketData(width=30.0),
        solver=SolverConfig(horizon=150.0, save_every=200),
    ),
    ExperimentConfig(
        name="delta-sweep-a4",
        kind=ExperimentKind.DELTA_SWEEP,
        A=4.0,
        grid=GridSpec(points=2048, resonant_modes=64),
        initial=PacketData(width=20.0),
        solver=SolverConfig(horizon=40.0, save_every=200),
    ),
    ExperimentConfig(
        name="delta-sweep-control",
        kind=ExperimentKind.DELTA_SWEEP,
        A=0.5,
        grid=GridSpec(extent=CONTROL_EXTENT, points=1024),
        initial=PacketData(k=1.0, width=20.0),
        sweep=SweepParams(control_wavenumber=1.0),
        solver=SolverConfig(horizon=50.0, save_every=200),
    ),
    ExperimentConfig(
        name="stability",
        kind=ExperimentKind.STABILITY,
        A=0.5,
        grid=GridSpec(extent=200.0, points=512),
        initial=GaussianData(width=2.0, amplitude=0.01),
        solver=SolverConfig(horizon=200.0, save_every=500),
    ),
    ExperimentConfig(
        name="picard",
        kind=ExperimentKind.PICARD,
        A=0.5,
        grid=GridSpec(extent=64.0, points=512),
        initial=GaussianData(width=1.0, amplitude=0.05),
        picard=PicardParams(horizon=0.1, substeps=64),
    ),
    ExperimentConfig(
        name="positivity",
        kind=ExperimentKind.POSITIVITY,
        A=0.0,
        grid=GridSpec(extent=64.0, points=512),
        initial=GaussianData(width=1.0, amplitude=1.0),
        solver=SolverConfig(horizon=5.0, formulation=Formulation.RAW, save_every=100),
    ),
    ExperimentConfig(
        name="consistency",
        kind=ExperimentKind.CONSISTENCY,
        grid=GridSpec(extent=64.0, points=256),
        initial=RandomData(amplitude=0.01, max_mode=8),
        consistency=ConsistencyParams(A_values=[0.5, 2.0]),
        solver=SolverConfig(horizon=5.0, save_every=50),
        seed=11,
    ),
    ExperimentConfig(
        name="convergence",
        kind=ExperimentKind.CONVERGENCE,
        A=2.0,
        grid=GridSpec(extent=50.0, points=128),
        initial=GaussianData(width=2.0, amplitude=1.0),
        solver=SolverConfig(horizon=2.0),
    ),
    ExperimentConfig(
        name="norms-suite",
        kind=ExperimentKind.NORMS_SUITE,
        grid=GridSpec(extent=32.0, points=512),
        seed=3,
    ),
    ExperimentConfig(
        name="evolve-comb",
        kind=ExperimentKind.EVOLVE,
        A=0.0,
        grid=GridSpec(extent=32.0, points=512),
        initial=CombData(period=1.0, width=0.15, amplitude=1.0),
        solver=SolverConfig(horizon=1.0, formulation=Formulation.RAW, save_every=500),
        norm=NormSpec(p=2.0),
    ),
]

EXPERIMENT_PRESETS: dict[str, ExperimentConfig] = {preset.name: preset for preset in _PRESETS}

# Presets run by each CLI subcommand when no --config is given.
DEFAULT_PRESETS: dict[str, list[str]] = {
    "dispersion": ["abscissa", "operator-suite"],
    "evolve": ["evolve-comb"],
    "picard": ["picard"],
    "decay": ["decay-1d"],
    "growth": ["growth-a4"],
    "delta-sweep": ["delta-sweep-a2"],
    "norms-suite": ["norms-suite"],
}


def get_preset(name: str) -> ExperimentConfig:
    """A copy of the named preset."""
    try:
        return EXPERIMENT_PRESETS[name].model_copy(deep=True)
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(EXPERIMENT_PRESETS))}") from None
