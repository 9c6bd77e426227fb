"""Norms, the linearized semigroup and rate fitting."""

from .fitting import RateFit, RateKind, fit_exponential, fit_power_law, relative_deviation
from .norms import (
    InequalityReport,
    check_cube_ball_sandwich,
    check_window_equivalence,
    check_young_uloc,
    heat_propagate,
    heat_uloc_spotcheck,
    local_norms,
    lp_norm,
    uloc_norm,
)
from .semigroup import (
    SemigroupSymbol,
    apply_grad_semigroup,
    apply_linear_operator,
    apply_semigroup,
    boundary_mass_fraction,
    build_near_eigenmode,
    dispersion_rate,
    eigenmode_deviation,
    eigenmode_residual,
    lattice_gap,
    lattice_max_rate,
    mu_l1_probe,
    peak_wavenumber,
    reference_decay_exponent,
    semigroup_decay_probe,
    semigroup_symbol,
    spectral_abscissa,
    wave_packet,
)

__all__ = [
    "RateFit",
    "RateKind",
    "fit_exponential",
    "fit_power_law",
    "relative_deviation",
    "InequalityReport",
    "check_cube_ball_sandwich",
    "check_window_equivalence",
    "check_young_uloc",
    "heat_propagate",
    "heat_uloc_spotcheck",
    "local_norms",
    "lp_norm",
    "uloc_norm",
    "SemigroupSymbol",
    "apply_grad_semigroup",
    "apply_linear_operator",
    "apply_semigroup",
    "boundary_mass_fraction",
    "build_near_eigenmode",
    "dispersion_rate",
    "eigenmode_deviation",
    "eigenmode_residual",
    "lattice_gap",
    "lattice_max_rate",
    "mu_l1_probe",
    "peak_wavenumber",
    "reference_decay_exponent",
    "semigroup_decay_probe",
    "semigroup_symbol",
    "spectral_abscissa",
    "wave_packet",
]
