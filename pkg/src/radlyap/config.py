"""Solver configuration shared by every operation.

All numerical operations are pure functions of their inputs plus one
:class:`SolverConfig` value; the module-level :data:`DEFAULT` instance is
used when none is passed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SolverConfig:
    # Integration of the radial equation.
    start_radius: float = 1e-6       # Taylor start point; removes the (N-1)/r singularity
    max_step: float = 1e-4           # fixed sample-grid step away from the origin
    freq_step_factor: float = 0.02   # cap on step * sqrt(sup a); keeps per-step error ~1e-10
    ramp_factor: float = 0.5         # step <= ramp_factor * r inside the initial layer

    # Eigenvalue search.
    scan_step: float = 1.0           # upward scan increment in unit-domain units
    max_scan_steps: int = 20000
    eig_rtol: float = 1e-10
    max_eigen_index: int = 10

    # Zeros and Neumann solvability.
    zero_xtol: float = 1e-10
    simple_zero_floor: float = 1e-8      # |u'(z)| >= floor * max|u'| for a simple zero
    ambiguous_run: int = 3               # consecutive near-zero samples flagging degeneracy
    ambiguous_floor: float = 1e-12
    neumann_rtol: float = 1e-7           # |u'(1)| < rtol * max|u'| counts as solvable
    boundary_zero_rtol: float = 1e-9     # |u(1)| < rtol * max|u| records a boundary zero
    interlace_tol: float = 1e-6

    # Admissibility: mu_k "precedes" a.
    precedes_slack: float = 1e-12    # a >= mu_k - slack everywhere
    strict_excess: float = 1e-9      # a >= mu_k + excess ...
    strict_window: float = 1e-3      # ... on some interval at least this long

    # Domains and quadrature.
    min_annulus_width: float = 1e-4
    quad_rtol: float = 1e-9

    # Family constructions / optimizer.
    gluing_floor: float = 1e-12      # interface derivative magnitude below this fails gluing

    def with_overrides(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs)


DEFAULT = SolverConfig()
