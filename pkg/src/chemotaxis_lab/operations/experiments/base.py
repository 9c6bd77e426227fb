"""Shared plumbing for experiment runners.

A runner takes an ExperimentContext and returns an ExperimentOutcome. It
never writes files; the orchestrator owns the run directory.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ...analysis.fitting import relative_deviation
from ...models.config import ExperimentConfig
from ...models.report import CheckResult
from ...spectral.grid import Grid, RealField
from ..artifacts import SeriesArtifact
from ..initial_data import build_initial_field, named_rng

LogFn = Callable[[str, str], None]


def _discard(message: str, level: str = "INFO") -> None:
    return None


@dataclass
class ExperimentContext:
    config: ExperimentConfig
    grid: Grid
    log: LogFn = _discard

    def initial_field(self, stream: str = "initial") -> RealField:
        return build_initial_field(self.config.initial, self.grid, self.config.A, self.config.seed, stream)

    def rng(self, stream: str) -> np.random.Generator:
        return named_rng(self.config.seed, stream)


@dataclass
class ExperimentOutcome:
    measured: dict[str, Any] = field(default_factory=dict)
    reference: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    series: list[SeriesArtifact] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check


Runner = Callable[[ExperimentContext], ExperimentOutcome]


def plain(value: Any) -> Any:
    """Convert numpy scalars and arrays (also nested) to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def _finite_or_none(value: float | None) -> float | None:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def flag(name: str, passed: bool, detail: str = "", measured: float | None = None) -> CheckResult:
    """Pass/fail check without a reference value."""
    return CheckResult(name=name, passed=bool(passed), measured=_finite_or_none(measured), detail=detail)


def within(
    name: str, measured: float, reference: float, tolerance: float, relative: bool = True, detail: str = ""
) -> CheckResult:
    """measured within tolerance of reference, relatively (default) or absolutely."""
    gap = relative_deviation(measured, reference) if relative else abs(measured - reference)
    passed = math.isfinite(measured) and gap <= tolerance
    return CheckResult(
        name=name,
        passed=bool(passed),
        measured=_finite_or_none(measured),
        reference=_finite_or_none(reference),
        tolerance=tolerance,
        detail=detail or f"deviation {gap:.3e}",
    )


def at_most(name: str, measured: float, bound: float, detail: str = "") -> CheckResult:
    passed = math.isfinite(measured) and measured <= bound
    return CheckResult(
        name=name,
        passed=bool(passed),
        measured=_finite_or_none(measured),
        reference=_finite_or_none(bound),
        detail=detail,
    )
