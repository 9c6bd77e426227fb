"""Configuration, report and preset models."""

from .config import (
    CombData,
    ConstantData,
    DecayParams,
    ExperimentConfig,
    ExperimentKind,
    FitWindow,
    Formulation,
    GaussianData,
    GridSpec,
    NormSpec,
    PacketData,
    RandomData,
    Scheme,
    SolverConfig,
    StopNorm,
    WindowShape,
)
from .presets import DEFAULT_PRESETS, EXPERIMENT_PRESETS, get_preset
from .report import PACKAGE_VERSION, SCHEMA_VERSION, CheckResult, ExperimentReport

__all__ = [
    "CombData",
    "ConstantData",
    "DecayParams",
    "ExperimentConfig",
    "ExperimentKind",
    "FitWindow",
    "Formulation",
    "GaussianData",
    "GridSpec",
    "NormSpec",
    "PacketData",
    "RandomData",
    "Scheme",
    "SolverConfig",
    "StopNorm",
    "WindowShape",
    "DEFAULT_PRESETS",
    "EXPERIMENT_PRESETS",
    "get_preset",
    "PACKAGE_VERSION",
    "SCHEMA_VERSION",
    "CheckResult",
    "ExperimentReport",
]
