"""Radial eigenproblems, explicit potential families, and Lyapunov constants."""

__version__ = "0.1.0"

from ._kernels import backend
from .config import DEFAULT, SolverConfig
from .potentials import (ClosedFormPiece, ConstantPiece, RadialPotential,
                         SampledPiece)
from .quadrature import ball_volume, sphere_measure
from .shooting import RadialSolution
from .spectra import (Annulus, Ball, EigenPair, SpectralProblem,
                      dirichlet_annulus_lambda1, dirichlet_ball_lambda1,
                      eigen_zeros, neumann_eigenvalue, neumann_pair,
                      neumann_radial_eigen)

__all__ = [
    "__version__", "backend", "DEFAULT", "SolverConfig",
    "RadialPotential", "ConstantPiece", "ClosedFormPiece", "SampledPiece",
    "sphere_measure", "ball_volume", "RadialSolution",
    "SpectralProblem", "Ball", "Annulus", "EigenPair",
    "neumann_radial_eigen", "neumann_pair", "neumann_eigenvalue",
    "dirichlet_ball_lambda1", "dirichlet_annulus_lambda1", "eigen_zeros",
]
