"""Experiment report models."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"
PACKAGE_VERSION = "0.1.0"


class CheckResult(BaseModel):
    """One acceptance check: a measured value against a reference and tolerance."""

    name: str
    passed: bool
    measured: float | None = None
    reference: float | None = None
    tolerance: float | None = None
    detail: str = ""


class ExperimentReport(BaseModel):
    """Everything a run produced, serialized to report.json."""

    schema_version: str = SCHEMA_VERSION
    package_version: str
    name: str
    kind: str
    seed: int
    config: dict[str, Any]
    measured: dict[str, Any] = Field(default_factory=dict)
    reference: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    passed: bool = False
    wall_clock_seconds: float = 0.0
    artifacts: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)
    errors: list[str] = Field(default_factory=list)
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    @property
    def failed_checks(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]
