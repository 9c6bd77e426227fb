"""Chemotaxis stability lab.

Pseudo-spectral experiments on the parabolic-elliptic Keller-Segel system
around a constant state A:
    - Dispersion relation and spectral abscissa of the linearization
    - Decay of the linearized semigroup below the threshold A = 1
    - Exponential growth and time-to-amplitude sweeps above it
    - Nonlinear ETD evolution, positivity and blow-up classification
    - Picard iteration of the mild formulation
    - Uniformly local norm inequalities

Every experiment is seeded and writes a norm series CSV and a JSON report.
"""

from .errors import (
    BoundaryContaminationError,
    ChemotaxisLabError,
    ConfigValidationError,
    PreconditionError,
)
from .lab import StabilityLab, load_config, load_configs, validate_config
from .models.report import PACKAGE_VERSION

__version__ = PACKAGE_VERSION

__all__ = [
    "StabilityLab",
    "load_config",
    "load_configs",
    "validate_config",
    "BoundaryContaminationError",
    "ChemotaxisLabError",
    "ConfigValidationError",
    "PreconditionError",
    "__version__",
]
