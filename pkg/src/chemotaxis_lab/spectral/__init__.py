"""Periodic grids, Fourier transforms and the Bessel-potential kernel."""

from .grid import (
    Grid,
    RealField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    make_grid,
    spectral_divergence,
    spectral_energy,
    spectral_gradient,
    spectral_laplacian,
)
from .kernels import (
    bessel_kernel_1d,
    bessel_kernel_1d_derivative,
    bessel_multiplier,
    convolve_bessel_kernel_1d,
    grad_K_conv,
    grad_kernel_l1_quadrature_1d,
    grad_kernel_lr_norm_1d,
    neg_laplace_K_conv,
    solve_chemoattractant,
)

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "apply_multiplier",
    "forward_transform",
    "inverse_transform",
    "make_grid",
    "spectral_divergence",
    "spectral_energy",
    "spectral_gradient",
    "spectral_laplacian",
    "bessel_kernel_1d",
    "bessel_kernel_1d_derivative",
    "bessel_multiplier",
    "convolve_bessel_kernel_1d",
    "grad_K_conv",
    "grad_kernel_l1_quadrature_1d",
    "grad_kernel_lr_norm_1d",
    "neg_laplace_K_conv",
    "solve_chemoattractant",
]
