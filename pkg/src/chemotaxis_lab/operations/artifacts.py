"""Run artifacts: norm time series as CSV and the JSON report.

Series files are written with 17 significant digits and a fixed column
order, so identical configs and seeds give byte-identical CSVs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics.solver import Trajectory
from ..models.report import ExperimentReport

SERIES_COLUMNS = ("time", "l1", "l2", "linf", "min")
FLOAT_FORMAT = ".16e"


def uloc_column(p: float) -> str:
    return "uloc_inf" if np.isinf(p) else f"uloc_{p:g}"


@dataclass
class SeriesArtifact:
    """Columns of one time series; every column has one entry per time."""

    filename: str
    times: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_trajectory(
        cls, trajectory: Trajectory, filename: str = "series.csv", uloc_p: float | None = None
    ) -> SeriesArtifact:
        columns = {
            "l1": trajectory.l1,
            "l2": trajectory.l2,
            "linf": trajectory.linf,
            "min": trajectory.minimum,
        }
        if trajectory.uloc is not None and uloc_p is not None:
            columns[uloc_column(uloc_p)] = trajectory.uloc
        return cls(filename, trajectory.times, columns)

    @property
    def header(self) -> list[str]:
        extra = [name for name in self.columns if name not in SERIES_COLUMNS]
        return ["time", *[name for name in SERIES_COLUMNS[1:] if name in self.columns], *extra]


def _format(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def write_series(series: SeriesArtifact, run_dir: Path) -> Path:
    """Write one series CSV into the run directory."""
    path = run_dir / series.filename
    header = series.header
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for i, t in enumerate(series.times):
            writer.writerow([_format(t), *(_format(series.columns[name][i]) for name in header[1:])])
    return path


def write_empty_series(run_dir: Path) -> Path:
    """Header-only series.csv for experiments without a time series."""
    path = run_dir / "series.csv"
    with open(path, "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerow(SERIES_COLUMNS)
    return path


def read_series(path: Path) -> dict[str, np.ndarray]:
    """Load a series CSV back into float columns."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(row[i]) for row in body]) for i, name in enumerate(header)}


def write_report(report: ExperimentReport, run_dir: Path) -> Path:
    path = run_dir / "report.json"
    with open(path, "w") as f:
        f.write(report.model_dump_json(indent=2))
        f.write("\n")
    return path


def load_report(path: Path) -> ExperimentReport:
    with open(path) as f:
        return ExperimentReport.model_validate(json.load(f))
