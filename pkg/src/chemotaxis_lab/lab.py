"""Stability lab: validated entry points for running experiments.

Configs are validated up front and every problem is reported at once.
Runs write their artifacts under <out>/<name>/. Suites run experiments in
separate processes; results do not depend on the worker count.
"""

from __future__ import annotations

import asyncio
import logging
import math
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from .dynamics.solver import stability_dt_max
from .errors import ConfigValidationError, PreconditionError
from .models.config import (
    ExperimentConfig,
    ExperimentKind,
    Formulation,
    PacketData,
    RandomData,
)
from .models.presets import EXPERIMENT_PRESETS
from .models.report import CheckResult, ExperimentReport
from .operations.initial_data import grid_for
from .operations.orchestrator import ExperimentOrchestrator

logger = logging.getLogger(__name__)

SUPPORTED_STABILITY_NORMS = (1.0, 2.0, math.inf)
MIN_DELTA_SPAN = 100.0
MAX_TARGET_FRACTION = 0.1


def _kind_errors(config: ExperimentConfig) -> list[str]:
    """Requirements that depend on the experiment kind."""
    errors: list[str] = []
    kind, A = config.kind, config.A
    if kind in (ExperimentKind.DECAY, ExperimentKind.STABILITY) and A >= 1.0:
        errors.append(f"'{kind.value}' needs A < 1, got A={A}")
    if kind is ExperimentKind.GROWTH and A <= 1.0:
        errors.append(f"'growth' needs A > 1, got A={A}")
    if kind is ExperimentKind.DECAY:
        decay = config.decay
        if not 1.0 <= decay.q <= decay.p:
            errors.append(f"'decay' needs 1 <= q <= p, got p={decay.p}, q={decay.q}")
        if decay.t_start >= decay.t_end:
            errors.append("'decay.t_start' must be below 'decay.t_end'")
    if kind is ExperimentKind.STABILITY:
        bad = [p for p in config.stability.exponents if p not in SUPPORTED_STABILITY_NORMS]
        if bad:
            errors.append(f"'stability.exponents' must be drawn from 1, 2, inf, got {bad}")
    if kind is ExperimentKind.POSITIVITY and config.solver.formulation is not Formulation.RAW:
        errors.append("'positivity' needs solver.formulation = raw")
    if kind is ExperimentKind.DELTA_SWEEP:
        sweep = config.sweep
        if not sweep.deltas:
            errors.append("'sweep.deltas' must not be empty")
        if any(d <= 0 or d >= sweep.target for d in sweep.deltas):
            errors.append(f"'sweep.deltas' must lie in (0, {sweep.target:g})")
        elif sweep.deltas and max(sweep.deltas) < MIN_DELTA_SPAN * min(sweep.deltas):
            errors.append("'sweep.deltas' must span at least two decades")
        # below the threshold no delta reaches the target
        if A > 1.0 and sweep.target > MAX_TARGET_FRACTION * A:
            bound = MAX_TARGET_FRACTION * A
            errors.append(f"'sweep.target' must be at most {MAX_TARGET_FRACTION:g}*A = {bound:g}")
    if kind is ExperimentKind.NORMS_SUITE:
        grid = config.grid
        if grid.dim != 1:
            errors.append("'norms_suite' runs in one dimension")
        extent = grid.extent if not isinstance(grid.extent, list) else grid.extent[0]
        points = grid.points if not isinstance(grid.points, list) else grid.points[0]
        if not float(extent).is_integer() or not float(points / extent).is_integer():
            errors.append(
                "'norms_suite' needs an integer box side and an integer number of nodes per unit"
            )
    return errors


def validate_config(config: ExperimentConfig) -> list[str]:
    """Validate an experiment configuration.

    Returns:
        Every problem found; an empty list means the config can run.
    """
    errors = _kind_errors(config)
    try:
        grid = grid_for(config)
    except PreconditionError as e:
        errors.append(f"grid: {e}")
        return errors

    dt_max = stability_dt_max(grid, config.A)
    if config.solver.dt is not None and config.solver.dt > dt_max:
        errors.append(f"'solver.dt' {config.solver.dt:g} exceeds the stability bound {dt_max:g}")
    if config.kind is ExperimentKind.CONVERGENCE and config.convergence.base_dt > dt_max:
        errors.append(f"'convergence.base_dt' {config.convergence.base_dt:g} exceeds {dt_max:g}")

    if config.norm is not None and config.norm.window_radius >= min(grid.extent) / 4.0:
        errors.append(f"'norm.window_radius' must be below {min(grid.extent) / 4.0:g}")

    initial = config.initial
    if isinstance(initial, PacketData):
        shortest = min(grid.extent)
        if 10.0 * initial.width > shortest:
            errors.append(
                f"packet width {initial.width} needs 10*width <= {shortest:g} on every axis"
            )
        if initial.k is None and config.A <= 1.0 and config.kind is not ExperimentKind.DELTA_SWEEP:
            errors.append("a packet without 'k' sits at the peak wavenumber, which needs A > 1")
    if isinstance(initial, RandomData) and initial.max_mode >= min(grid.points) // 3:
        errors.append(f"'initial.max_mode' must stay below N/3 = {min(grid.points) // 3}")
    return errors


def _parse(data: Any, source: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        messages = [
            f"{source}: {'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in e.errors()
        ]
        raise ConfigValidationError(messages) from e


def load_configs(path: Path | str) -> list[ExperimentConfig]:
    """Load one experiment, or an `experiments:` list of them, from YAML."""
    path = Path(path)
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigValidationError([f"{path.name}: not valid YAML: {e}"]) from e
    if isinstance(data, dict) and "experiments" in data:
        return [_parse(item, f"{path.name}[{i}]") for i, item in enumerate(data["experiments"])]
    return [_parse(data, path.name)]


def load_config(path: Path | str) -> ExperimentConfig:
    configs = load_configs(path)
    if len(configs) != 1:
        message = f"{Path(path).name}: expected one experiment, found {len(configs)}"
        raise ConfigValidationError([message])
    return configs[0]


def _run_isolated(payload: dict[str, Any], out_dir: str) -> dict[str, Any]:
    """Process-pool entry point: plain data in, plain data out."""
    config = ExperimentConfig.model_validate(payload)
    report = ExperimentOrchestrator(config, out_dir).run()
    return report.model_dump(mode="json")


class StabilityLab:
    """Runs validated experiments and collects their reports.

    Public API (the "studs"):
        validate_config: every problem with a config, as messages
        run: one experiment, artifacts under out_dir/name
        delta_sweep: time-to-amplitude sweep for a given A
        run_suite: many experiments in worker processes
        verify: the acceptance presets
    """

    def __init__(
        self,
        out_dir: Path | str = "runs",
        on_check: Callable[[CheckResult], None] | None = None,
    ) -> None:
        self.out_dir = Path(out_dir)
        self._on_check = on_check

    def validate_config(self, config: ExperimentConfig) -> list[str]:
        return validate_config(config)

    def _require_valid(self, config: ExperimentConfig) -> None:
        errors = validate_config(config)
        if errors:
            raise ConfigValidationError([f"{config.name}: {message}" for message in errors])

    def run(self, config: ExperimentConfig, out_dir: Path | str | None = None) -> ExperimentReport:
        """Run one experiment.

        Raises:
            ConfigValidationError: Listing every problem with the config.
        """
        self._require_valid(config)
        target = Path(out_dir) if out_dir is not None else self.out_dir
        report = ExperimentOrchestrator(config, target, on_check=self._on_check).run()
        logger.info(f"{config.name}: {'passed' if report.passed else 'failed'}")
        return report

    def delta_sweep(
        self,
        A: float,
        deltas: Iterable[float],
        target: float,
        base_config: ExperimentConfig,
        out_dir: Path | str | None = None,
    ) -> ExperimentReport:
        """Sweep initial sizes at background A with base_config's grid, packet and solver."""
        sweep = base_config.sweep.model_copy(update={"deltas": list(deltas), "target": target})
        config = base_config.model_copy(
            update={"kind": ExperimentKind.DELTA_SWEEP, "A": A, "sweep": sweep}
        )
        return self.run(config, out_dir)

    async def run_suite(
        self,
        configs: Iterable[ExperimentConfig],
        out_dir: Path | str | None = None,
        max_workers: int | None = None,
    ) -> list[ExperimentReport]:
        """Run experiments in worker processes; reports come back in input order.

        Raises:
            ConfigValidationError: Listing the problems of every invalid config,
                before anything runs.
        """
        configs = list(configs)
        errors = [f"{c.name}: {message}" for c in configs for message in validate_config(c)]
        names = [c.name for c in configs]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        errors += [f"duplicate experiment name '{name}'" for name in duplicates]
        if errors:
            raise ConfigValidationError(errors)

        target = str(Path(out_dir) if out_dir is not None else self.out_dir)
        if max_workers == 1:
            payloads = [
                await asyncio.to_thread(_run_isolated, c.model_dump(mode="json"), target)
                for c in configs
            ]
        else:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=max_workers) as pool:
                futures = [
                    loop.run_in_executor(pool, _run_isolated, c.model_dump(mode="json"), target)
                    for c in configs
                ]
                payloads = await asyncio.gather(*futures)
        reports = [ExperimentReport.model_validate(payload) for payload in payloads]
        for report in reports:
            for check in report.checks:
                if self._on_check:
                    self._on_check(check)
        return reports

    async def verify(
        self,
        names: Iterable[str] | None = None,
        out_dir: Path | str | None = None,
        max_workers: int | None = None,
    ) -> list[ExperimentReport]:
        """Run the acceptance presets (all of them by default)."""
        selected = list(names) if names is not None else list(EXPERIMENT_PRESETS)
        unknown = [name for name in selected if name not in EXPERIMENT_PRESETS]
        if unknown:
            raise ConfigValidationError([f"unknown preset '{name}'" for name in unknown])
        configs = [EXPERIMENT_PRESETS[name] for name in selected]
        return await self.run_suite(configs, out_dir, max_workers)
