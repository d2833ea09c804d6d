"""Zero structure of radial solutions for admissible potentials.

Admissibility of a potential a at level k asks for two things: a dominates
mu_k pointwise with strict excess on a window of positive length, and the
shot solution satisfies the outer Neumann condition.  For such potentials
the solution must carry at least k+1 zeros, the last k of them interlacing
the eigenfunction zeros from the right; the routines here verify both
claims numerically and evaluate the boundary-flux identity that drives
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, SolverConfig
from .errors import MembershipFailure
from .potentials import RadialPotential
from .quadrature import radial_integral, sphere_measure
from .shooting import RadialSolution, locate_zeros, ode_residual, shoot_from_center
from .spectra import neumann_pair


def shoot_radial(dimension: int, potential: RadialPotential,
                 cfg: SolverConfig = DEFAULT, scale: float = 1.0) -> RadialSolution:
    """Integrate the radial equation for ``potential`` from the origin.

    The solution is normalized by u(0+) = scale (default 1) with u'(0+) = 0
    through the series start; zeros are refined eagerly.
    """
    sol = shoot_from_center(dimension, potential.segments(cfg), cfg, scale)
    return locate_zeros(sol, cfg)


@dataclass
class ZeroReport:
    zero_count: int
    zeros: np.ndarray
    interlace_ok: bool
    interlace_margins: np.ndarray
    neumann_residual: float
    boundary_zero: bool = False


def count_and_locate_zeros(sol: RadialSolution,
                           cfg: SolverConfig = DEFAULT) -> ZeroReport:
    """Zeros of a converged solution, counted in (0, 1].

    A vanishing outer endpoint is included in the count but flagged, since
    it is a boundary zero rather than an interior crossing.
    """
    vmax = float(np.max(np.abs(sol.du)))
    return ZeroReport(
        zero_count=int(sol.zeros.size),
        zeros=sol.zeros.copy(),
        interlace_ok=True,
        interlace_margins=np.empty(0),
        neumann_residual=abs(sol.end_derivative) / (vmax + 1e-300),
        boundary_zero=sol.boundary_zero,
    )


@dataclass
class MembershipReport:
    member: bool
    neumann_residual: float      # |u'(1)| / max |u'|
    min_excess: float            # min of a - mu_k over the check grid
    strict_window: float         # longest run with a >= mu_k + strict_excess
    zero_count: int
    mu_k: float
    reasons: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.member


def is_member_gamma_k(dimension: int, index: int, potential: RadialPotential,
                      tol: float | None = None,
                      cfg: SolverConfig = DEFAULT) -> MembershipReport:
    """Check admissibility of ``potential`` at eigenvalue level ``index``.

    Pointwise domination and the strict-excess window are checked on a fine
    grid refined at the potential's breakpoints; solvability is the relative
    terminal slope of the shot solution.
    """
    if tol is None:
        tol = cfg.neumann_rtol
    mu = neumann_pair(dimension, index, cfg).eigenvalue

    cuts = [0.0] + potential.breakpoints() + [1.0]
    grids = [np.linspace(a, b, max(16, int(4096 * (b - a))) + 1)[:-1]
             for a, b in zip(cuts[:-1], cuts[1:])]
    grid = np.concatenate(grids + [np.asarray([1.0])])
    grid = grid[grid >= cfg.start_radius]
    vals = potential.evaluate(grid)
    excess = vals - mu

    reasons = []
    min_excess = float(np.min(excess))
    if min_excess < -cfg.precedes_slack:
        reasons.append(f"a falls {-min_excess:.3e} below mu_{index}")

    strict = excess >= cfg.strict_excess
    window = 0.0
    run_start = None
    for i, flag in enumerate(strict):
        if flag and run_start is None:
            run_start = grid[i]
        elif not flag and run_start is not None:
            window = max(window, grid[i] - run_start)
            run_start = None
    if run_start is not None:
        window = max(window, grid[-1] - run_start)
    if window < cfg.strict_window:
        reasons.append(f"strict excess window {window:.2e} shorter than "
                       f"{cfg.strict_window:g}")

    sol = shoot_radial(dimension, potential, cfg)
    resid = abs(sol.end_derivative) / (float(np.max(np.abs(sol.du))) + 1e-300)
    if resid >= tol:
        reasons.append(f"terminal slope residual {resid:.3e} >= {tol:g}")

    return MembershipReport(
        member=not reasons,
        neumann_residual=resid,
        min_excess=min_excess,
        strict_window=window,
        zero_count=int(sol.zeros.size),
        mu_k=mu,
        reasons=reasons,
    )


def verify_interlacing(dimension: int, index: int, potential: RadialPotential,
                       cfg: SolverConfig = DEFAULT) -> ZeroReport:
    """Zero count and interlacing margins of a member's solution.

    The last ``index`` zeros (the largest ones) are compared against the
    eigenfunction zeros; margins are x_i - r_i, nonnegative up to the
    configured slack when the oscillation claims hold.
    """
    membership = is_member_gamma_k(dimension, index, potential, cfg=cfg)
    if not membership:
        raise MembershipFailure("; ".join(membership.reasons))

    sol = shoot_radial(dimension, potential, cfg)
    report = count_and_locate_zeros(sol, cfg)
    if index >= 1:
        rz = neumann_pair(dimension, index, cfg).zeros
        if report.zero_count >= index:
            margins = report.zeros[-index:] - rz
        else:
            margins = np.full(index, -np.inf)
        report.interlace_margins = margins
        report.interlace_ok = bool(np.all(margins >= -cfg.interlace_tol))
    return report


def orthogonality_identity_residual(dimension: int, index: int,
                                    potential: RadialPotential,
                                    sol: RadialSolution, radius: float,
                                    inner_radius: float = 0.0,
                                    cfg: SolverConfig = DEFAULT) -> float:
    """Defect of the boundary-flux identity on the ball or annulus shell.

    Compares the weighted integral of (a - mu_k) u phi_k over the shell
    (inner_radius, radius) against the boundary terms
    omega_N r^(N-1) u(r) phi_k'(r) evaluated at the shell radii.  The two
    sides agree whenever the shell radii are zeros of phi_k.
    """
    pair = neumann_pair(dimension, index, cfg)
    mu = pair.eigenvalue
    omega = sphere_measure(dimension)

    def integrand(r):
        return (potential.evaluate(r) - mu) * sol.value(r) * pair.value(r)

    lhs = radial_integral(integrand, dimension, inner_radius, radius,
                          rtol=cfg.quad_rtol,
                          breakpoints=potential.breakpoints())
    rhs = omega * radius**(dimension - 1) * float(sol.value(radius)) \
        * float(pair.derivative(radius))
    if inner_radius > 0.0:
        rhs -= omega * inner_radius**(dimension - 1) \
            * float(sol.value(inner_radius)) \
            * float(pair.derivative(inner_radius))
    return abs(lhs - rhs)


def identity_scale(dimension: int, index: int, potential: RadialPotential,
                   sol: RadialSolution, radius: float,
                   cfg: SolverConfig = DEFAULT) -> float:
    """Natural magnitude against which the identity residual is judged."""
    pair = neumann_pair(dimension, index, cfg)
    mu = pair.eigenvalue
    omega = sphere_measure(dimension)

    def absintegrand(r):
        return np.abs((potential.evaluate(r) - mu) * sol.value(r)
                      * pair.value(r))

    bulk = radial_integral(absintegrand, dimension, 0.0, radius,
                           rtol=1e-6, breakpoints=potential.breakpoints())
    edge = omega * radius**(dimension - 1) * float(np.max(np.abs(sol.u))) \
        * float(np.max(np.abs(pair.solution.du)))
    return max(bulk, edge, 1e-12)


def solution_residual(dimension: int, potential: RadialPotential,
                      sol: RadialSolution) -> float:
    """Relative flux-balance defect of a solution against a potential."""
    return ode_residual(sol, potential.evaluate, dimension)
