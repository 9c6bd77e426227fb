"""Experiment configuration models."""

from __future__ import annotations

import math
from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import BaseModel, BeforeValidator, Field, PlainSerializer, model_validator


def _parse_exponent(value: object) -> object:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "max"):
        return math.inf
    return value


def _dump_exponent(value: float) -> float | str:
    return "inf" if math.isinf(value) else value


# Lebesgue exponent in [1, inf]; "inf" in config files means the max-norm.
Exponent = Annotated[
    float,
    BeforeValidator(_parse_exponent),
    PlainSerializer(_dump_exponent),
    Field(ge=1.0),
]


class ExperimentKind(str, Enum):
    """Experiment families the lab can run."""

    DISPERSION = "dispersion"
    OPERATOR_SUITE = "operator_suite"
    DECAY = "decay"
    GROWTH = "growth"
    DELTA_SWEEP = "delta_sweep"
    STABILITY = "stability"
    EVOLVE = "evolve"
    PICARD = "picard"
    POSITIVITY = "positivity"
    CONSISTENCY = "consistency"
    CONVERGENCE = "convergence"
    NORMS_SUITE = "norms_suite"


class Scheme(str, Enum):
    ETD1 = "etd1"
    ETD_RK2 = "etd_rk2"


class Formulation(str, Enum):
    """Evolve the density u itself, or the perturbation v = u - A."""

    RAW = "raw"
    PERTURBATION = "perturbation"


class WindowShape(str, Enum):
    BALL = "ball"
    CUBE = "cube"


class StopNorm(str, Enum):
    LINF = "linf"
    L2 = "l2"


class GridSpec(BaseModel):
    """Periodic box parameters; scalars apply to every axis.

    With resonant_modes set (and A > 1) the first axis is sized so that the
    fastest-growing wavenumber is exactly that lattice mode, overriding extent.
    """

    dim: int = 1
    extent: float | list[float] = 64.0
    points: int | list[int] = 256
    resonant_modes: int | None = Field(default=None, ge=1)


class SolverConfig(BaseModel):
    """Time stepping parameters for the ETD solver."""

    A: float = 0.0
    dt: float | None = Field(default=None, gt=0)  # None -> 0.25 * dt_max
    horizon: float = Field(default=10.0, gt=0)
    dealias: bool = True
    scheme: Scheme = Scheme.ETD_RK2
    formulation: Formulation = Formulation.PERTURBATION
    positivity_tol: float = Field(default=1e-8, ge=0)
    blowup_factor: float = Field(default=1e6, gt=1)
    blowup_threshold: float | None = Field(default=None, gt=0)
    save_every: int = Field(default=10, ge=1)
    stop_amplitude: float | None = Field(default=None, gt=0)
    stop_norm: StopNorm = StopNorm.L2


class NormSpec(BaseModel):
    """Uniformly local norm parameters."""

    p: Exponent = 2.0
    window_radius: float = Field(default=1.0, gt=0)
    window_shape: WindowShape = WindowShape.BALL
    stride: int = Field(default=1, ge=1)


class FitWindow(BaseModel):
    """Time window for rate fits; a missing bound is chosen by the experiment."""

    t_min: float | None = Field(default=None, ge=0)
    t_max: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> FitWindow:
        if self.t_min is not None and self.t_max is not None and self.t_min >= self.t_max:
            raise ValueError(f"fit window needs t_min < t_max, got ({self.t_min}, {self.t_max})")
        return self


class GaussianData(BaseModel):
    kind: Literal["gaussian"] = "gaussian"
    center: float | list[float] = 0.0
    width: float = Field(default=1.0, gt=0)
    amplitude: float = 1.0
    mass: float | None = None  # rescale to this integral when set


class PacketData(BaseModel):
    """Gaussian-envelope plane wave; k=None selects the fastest-growing wavenumber."""

    kind: Literal["packet"] = "packet"
    k: float | None = Field(default=None, gt=0)
    width: float = Field(default=20.0, gt=0)
    amplitude: float = 1e-4
    center: float = 0.0
    l2_norm: float | None = Field(default=None, gt=0)


class CombData(BaseModel):
    """Periodic array of identical bumps: bounded but not decaying."""

    kind: Literal["comb"] = "comb"
    period: float = Field(default=1.0, gt=0)
    width: float = Field(default=0.1, gt=0)
    amplitude: float = 1.0


class ConstantData(BaseModel):
    kind: Literal["constant"] = "constant"
    value: float = 1.0


class RandomData(BaseModel):
    """Smooth mean-zero random field built from lattice modes |m| <= max_mode."""

    kind: Literal["random"] = "random"
    amplitude: float = 1e-2
    max_mode: int = Field(default=8, ge=1)


InitialData = Annotated[
    Union[GaussianData, PacketData, CombData, ConstantData, RandomData],
    Field(discriminator="kind"),
]


class DecayParams(BaseModel):
    """Linear decay probe: fitted exponent of ||S_A(t)v0||_p against the q-data rate."""

    p: Exponent = math.inf
    q: Exponent = 1.0
    t_start: float = Field(default=5.0, gt=0)
    t_end: float = Field(default=200.0, gt=0)
    samples: int = Field(default=40, ge=3)
    gradient: bool = False
    tolerance: float = Field(default=0.05, gt=0)
    heat_control: bool = True
    heat_tolerance: float = Field(default=0.02, gt=0)


class GrowthParams(BaseModel):
    """Nonlinear growth of a packet until ||v||_inf reaches amplitude_fraction * A."""

    amplitude_fraction: float = Field(default=0.1, gt=0)
    tolerance: float = Field(default=0.05, gt=0)
    transient_fraction: float = Field(default=0.2, ge=0, lt=1)


class SweepParams(BaseModel):
    """Time-to-target over a range of initial perturbation sizes."""

    deltas: list[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5])
    target: float = Field(default=0.05, gt=0)
    tolerance: float = Field(default=0.1, gt=0)
    control_wavenumber: float = Field(default=1.0, gt=0)


class StabilityParams(BaseModel):
    """Global run below the threshold plus an unstable control with the same data."""

    control_A: float = 2.0
    monotone_after: float = Field(default=5.0, ge=0)
    exponents: list[Exponent] = Field(default_factory=lambda: [1.0, 2.0, math.inf])


class PicardParams(BaseModel):
    horizon: float = Field(default=0.1, gt=0)
    substeps: int = Field(default=64, ge=2)
    max_iter: int = Field(default=30, ge=1)
    tol: float = Field(default=1e-12, gt=0)
    p: Exponent = 2.0
    ratio_bound: float = Field(default=0.5, gt=0)
    agreement_tol: float = Field(default=1e-4, gt=0)


class ConsistencyParams(BaseModel):
    A_values: list[float] = Field(default_factory=lambda: [0.5, 2.0])
    tolerance: float = Field(default=1e-8, gt=0)
    epsilons: list[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4])


class ConvergenceParams(BaseModel):
    base_dt: float = Field(default=0.05, gt=0)
    etd1_range: tuple[float, float] = (1.6, 2.6)
    etd_rk2_range: tuple[float, float] = (3.2, 4.8)


class SuiteParams(BaseModel):
    """Sample counts and tolerances for the operator and norms suites."""

    random_fields: int = Field(default=100, ge=1)
    composition_samples: int = Field(default=50, ge=1)
    sandwich_fields: int = Field(default=200, ge=1)
    abscissa_values: list[float] = Field(default_factory=lambda: [1.5, 2.0, 4.0, 9.0])
    mu_times: list[float] = Field(default_factory=lambda: [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0])
    young_max_constant: float = Field(default=3.0, gt=0)
    heat_max_constant: float = Field(default=10.0, gt=0)


class ExperimentConfig(BaseModel):
    """One named, reproducible experiment."""

    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    kind: ExperimentKind
    grid: GridSpec = Field(default_factory=GridSpec)
    A: float = 0.0
    initial: InitialData = Field(default_factory=GaussianData)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    fit_window: FitWindow = Field(default_factory=FitWindow)
    norm: NormSpec | None = None
    seed: int = Field(default=0, ge=0)

    decay: DecayParams = Field(default_factory=DecayParams)
    growth: GrowthParams = Field(default_factory=GrowthParams)
    sweep: SweepParams = Field(default_factory=SweepParams)
    stability: StabilityParams = Field(default_factory=StabilityParams)
    picard: PicardParams = Field(default_factory=PicardParams)
    consistency: ConsistencyParams = Field(default_factory=ConsistencyParams)
    convergence: ConvergenceParams = Field(default_factory=ConvergenceParams)
    suite: SuiteParams = Field(default_factory=SuiteParams)

    def solver_for(self, A: float | None = None, **overrides: object) -> SolverConfig:
        """The solver config with A taken from the experiment (or the argument)."""
        update = {"A": self.A if A is None else A, **overrides}
        return self.solver.model_copy(update=update)
