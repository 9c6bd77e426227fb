"""Experiment orchestrator.

Runs one configured experiment end to end: builds the grid, dispatches to
the runner for its kind, writes the series CSVs and report.json into
<out>/<name>/, and keeps a run log alongside them.
"""

from __future__ import annotations

import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from ..models.config import ExperimentConfig
from ..models.report import PACKAGE_VERSION, CheckResult, ExperimentReport
from .artifacts import write_empty_series, write_report, write_series
from .experiments import EXPERIMENT_RUNNERS, ExperimentContext, ExperimentOutcome, plain
from .initial_data import grid_for

logger = logging.getLogger(__name__)


class ExperimentOrchestrator:
    """Runs a single experiment and owns its run directory.

    Manages:
    - Grid construction and runner dispatch
    - Series and report artifacts
    - A timestamped run log (also kept in memory)

    Runner errors are captured into the report instead of propagating, so a
    suite keeps going when one experiment fails.
    """

    def __init__(
        self,
        config: ExperimentConfig,
        out_dir: Path | str,
        on_check: Callable[[CheckResult], None] | None = None,
    ) -> None:
        """Initialize the orchestrator.

        Args:
            config: Validated experiment configuration
            out_dir: Parent directory; artifacts go to out_dir/config.name
            on_check: Callback for every check as it is recorded
        """
        self.config = config
        self.run_dir = Path(out_dir) / config.name
        self._on_check = on_check

        self._logs: list[str] = []
        self._check_count = 0
        self._log_file: Path | None = None

        self._setup_logging()

    @property
    def check_count(self) -> int:
        """Number of checks recorded so far."""
        return self._check_count

    @property
    def logs(self) -> list[str]:
        return list(self._logs)

    def _setup_logging(self) -> None:
        """Create the run directory and start a fresh run.log."""
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self._log_file = self.run_dir / "run.log"
        self._log_file.write_text("")

    def _log(self, message: str, level: str = "INFO") -> None:
        """Log a message to the run log and the module logger."""
        timestamp = datetime.now(timezone.utc).isoformat()
        log_line = f"[{timestamp}] [{level}] {message}"
        self._logs.append(log_line)
        logger.log(getattr(logging, level, logging.INFO), message)

        if self._log_file:
            with open(self._log_file, "a") as f:
                f.write(log_line + "\n")

    def _record_check(self, check: CheckResult) -> None:
        self._check_count += 1
        level = "INFO" if check.passed else "WARNING"
        self._log(f"Check {check.name}: {'passed' if check.passed else 'FAILED'} {check.detail}".rstrip(), level)
        if self._on_check:
            self._on_check(check)

    def run(self) -> ExperimentReport:
        """Run the experiment and write its artifacts.

        Returns:
            The report, also written to run_dir/report.json.
        """
        config = self.config
        report = ExperimentReport(
            package_version=PACKAGE_VERSION,
            name=config.name,
            kind=config.kind.value,
            seed=config.seed,
            config=config.model_dump(mode="json"),
        )
        self._log(f"Starting {config.kind.value} experiment {config.name} (seed {config.seed})")
        started = time.perf_counter()

        outcome = ExperimentOutcome()
        try:
            grid = grid_for(config)
            self._log(f"Grid {grid.describe()}")
            outcome = EXPERIMENT_RUNNERS[config.kind](ExperimentContext(config, grid, self._log))
        except Exception as e:
            self._log(f"Experiment {config.name} failed: {e}", "ERROR")
            report.errors.append(f"{type(e).__name__}: {e}")

        for check in outcome.checks:
            self._record_check(check)

        try:
            if outcome.series:
                paths = [write_series(series, self.run_dir) for series in outcome.series]
            else:
                paths = [write_empty_series(self.run_dir)]
        except OSError as e:
            self._log(f"Writing series failed: {e}", "ERROR")
            report.errors.append(f"{type(e).__name__}: {e}")
            paths = []

        report.measured = plain(outcome.measured)
        report.reference = plain(outcome.reference)
        report.checks = list(outcome.checks)
        report.notes = list(outcome.notes)
        report.artifacts = sorted({path.name for path in paths} | {"report.json", "run.log"})
        report.passed = not report.errors and bool(report.checks) and not report.failed_checks
        report.wall_clock_seconds = time.perf_counter() - started

        verdict = "passed" if report.passed else "failed"
        self._log(f"Experiment {config.name} {verdict} ({self._check_count} checks)")
        write_report(report, self.run_dir)
        return report
