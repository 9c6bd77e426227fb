"""Least-squares rate fits on log-transformed time series."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from ..errors import PreconditionError

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 3


class RateKind(str, Enum):
    ALGEBRAIC = "algebraic"  # value ~ prefactor * t**exponent
    EXPONENTIAL = "exponential"  # value ~ prefactor * exp(exponent * t)


@dataclass(frozen=True)
class RateFit:
    """A fitted decay or growth rate.

    Attributes:
        exponent: Power of t (algebraic) or rate in t (exponential)
        prefactor: Fitted constant in front
        residual: Root-mean-square residual of the log fit
        window: (t_min, t_max) actually covered by the fitted samples
        kind: Algebraic or exponential
        samples: Number of samples in the fit
    """

    exponent: float
    prefactor: float
    residual: float
    window: tuple[float, float]
    kind: RateKind
    samples: int

    def __post_init__(self) -> None:
        if not self.window[0] < self.window[1]:
            raise PreconditionError(f"fit window must satisfy t_min < t_max, got {self.window}")
        if self.residual < 0:
            raise PreconditionError("residual must be non-negative")

    def as_dict(self) -> dict[str, object]:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "residual": self.residual,
            "window": list(self.window),
            "kind": self.kind.value,
            "samples": self.samples,
        }


def _select(
    times: Sequence[float] | np.ndarray,
    values: Sequence[float] | np.ndarray,
    window: tuple[float | None, float | None] | None,
) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if t.shape != v.shape:
        raise PreconditionError("times and values differ in length")
    lo, hi = window if window is not None else (None, None)
    keep = np.isfinite(v) & (v > 0)
    if lo is not None:
        keep &= t >= lo
    if hi is not None:
        keep &= t <= hi
    if np.count_nonzero(keep) < MIN_FIT_SAMPLES:
        raise PreconditionError(
            f"need at least {MIN_FIT_SAMPLES} positive samples in the fit window, "
            f"got {np.count_nonzero(keep)}"
        )
    return t[keep], v[keep]


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    result = stats.linregress(x, y)
    residuals = y - (result.intercept + result.slope * x)
    return float(result.slope), float(result.intercept), float(np.sqrt(np.mean(residuals**2)))


def fit_power_law(
    times: Sequence[float] | np.ndarray,
    values: Sequence[float] | np.ndarray,
    window: tuple[float | None, float | None] | None = None,
) -> RateFit:
    """Fit log(value) = log(C) + alpha * log(t) over the window."""
    t, v = _select(times, values, window)
    if np.any(t <= 0):
        raise PreconditionError("power-law fits need positive times")
    slope, intercept, residual = _linear_fit(np.log(t), np.log(v))
    window_used = (float(t[0]), float(t[-1]))
    return RateFit(
        slope, float(np.exp(intercept)), residual, window_used, RateKind.ALGEBRAIC, t.size
    )


def fit_exponential(
    times: Sequence[float] | np.ndarray,
    values: Sequence[float] | np.ndarray,
    window: tuple[float | None, float | None] | None = None,
) -> RateFit:
    """Fit log(value) = log(C) + lambda * t over the window."""
    t, v = _select(times, values, window)
    slope, intercept, residual = _linear_fit(t, np.log(v))
    window_used = (float(t[0]), float(t[-1]))
    return RateFit(
        slope, float(np.exp(intercept)), residual, window_used, RateKind.EXPONENTIAL, t.size
    )


def relative_deviation(measured: float, reference: float) -> float:
    """|measured - reference| / |reference|, or the absolute gap when reference is 0."""
    if reference == 0:
        return abs(measured)
    return abs(measured - reference) / abs(reference)
