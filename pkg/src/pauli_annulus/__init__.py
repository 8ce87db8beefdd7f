"""Semiclassical Dirichlet-Pauli spectra on an annulus with a radial magnetic field."""

__version__ = "0.1.0"

from .asymptotics import PrefactorLaw, alpha_k, f_eval, predicted_lambda
from .errors import (CoercivityError, DomainError, InvariantError, NumericalGuardError,
                     PauliAnnulusError, ResolutionError)
from .fiber_solver import (FiberProblem, FiberSpectrum, LogScaled, assemble_direct,
                           assemble_weighted, kernel_residual, solve_fiber,
                           variational_upper_bound)
from .gauge import GaugeData, compute_c0, flux_at_scale, theta_gradient_magnitude
from .radial_field import (AnnulusGeometry, RadialField, ScalarPotential, phi_at,
                           solve_scalar_potential)
from .spectrum import SpectrumRequest, ab_sweep, assemble, convergence_study
from .tridiag import BACKEND, TridiagonalSym, smallest_eigenvalues

__all__ = [
    "AnnulusGeometry", "RadialField", "ScalarPotential", "solve_scalar_potential", "phi_at",
    "GaugeData", "compute_c0", "flux_at_scale", "theta_gradient_magnitude",
    "FiberProblem", "FiberSpectrum", "LogScaled", "assemble_direct", "assemble_weighted",
    "kernel_residual", "solve_fiber", "variational_upper_bound",
    "PrefactorLaw", "alpha_k", "f_eval", "predicted_lambda",
    "SpectrumRequest", "assemble", "ab_sweep", "convergence_study",
    "TridiagonalSym", "smallest_eigenvalues", "BACKEND",
    "PauliAnnulusError", "DomainError", "InvariantError", "NumericalGuardError",
    "ResolutionError", "CoercivityError",
]
