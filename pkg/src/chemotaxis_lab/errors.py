"""Exception hierarchy for the chemotaxis stability lab.

Caller mistakes (bad grids, out-of-range exponents, unstable time steps)
raise. Scientific outcomes such as a blow-up, a failed positivity check or
a non-contracting Picard iteration are reported as data, never raised.
"""

from __future__ import annotations


class ChemotaxisLabError(Exception):
    """Base class for all lab errors."""


class PreconditionError(ChemotaxisLabError, ValueError):
    """An operation was called outside its documented domain."""


class BoundaryContaminationError(PreconditionError):
    """A requested fit window reaches times where mass has hit the box edge."""

    def __init__(self, message: str, fraction: float, time: float) -> None:
        super().__init__(message)
        self.fraction = fraction
        self.time = time


class ConfigValidationError(ChemotaxisLabError, ValueError):
    """An experiment configuration failed validation.

    Attributes:
        errors: Every validation message collected for the configuration.
    """

    def __init__(self, errors: list[str]) -> None:
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) or "invalid configuration")
