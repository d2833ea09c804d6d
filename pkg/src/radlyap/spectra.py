"""Radial eigenvalue problems on balls and annuli in R^N.

Eigenvalues are found by shooting on the weighted Sturm-Liouville form
-(r^(N-1) u')' = lam r^(N-1) u.  The upward scan monitors the interior
zero count, which is nondecreasing in lam and pins the oscillation index
unambiguously; the terminal functional (u at the outer radius for
Dirichlet, u' for Neumann) is then bisected inside the count-delimited
bracket.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT, SolverConfig
from .errors import ConfigError, DegenerateAnnulus, NonConvergence, ZeroCountMismatch
from .quadrature import radial_integral, sphere_measure
from .shooting import (RadialSolution, constant_segments, count_sign_changes,
                       integrate_segments, locate_zeros, shoot_from_center)


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float


@dataclass(frozen=True)
class SpectralProblem:
    """One radial eigenproblem: dimension, domain and boundary condition."""

    dimension: int
    domain: object
    bc: str = "neumann"

    def __post_init__(self):
        if self.dimension < 2:
            raise ConfigError("dimension must be >= 2")
        if self.bc not in ("dirichlet", "neumann"):
            raise ConfigError(f"unknown boundary condition {self.bc!r}")
        if isinstance(self.domain, Ball):
            if self.domain.radius <= 0:
                raise ConfigError("ball radius must be positive")
        elif isinstance(self.domain, Annulus):
            if not 0 < self.domain.inner < self.domain.outer:
                raise ConfigError("annulus needs 0 < inner < outer")
            if self.bc == "neumann":
                raise ConfigError("Neumann problems are offered on balls only")
        else:
            raise ConfigError("domain must be Ball or Annulus")


@dataclass
class EigenPair:
    """Converged eigenvalue with normalized eigenfunction samples."""

    eigenvalue: float
    index: int
    solution: RadialSolution
    sphere_measure: float
    dimension: int
    bc: str
    domain: object

    @property
    def zeros(self) -> np.ndarray:
        return self.solution.zeros

    @property
    def samples(self) -> np.ndarray:
        return self.solution.samples

    def value(self, r):
        return self.solution.value(r)

    def derivative(self, r):
        return self.solution.derivative(r)


def _shoot_const(dimension, lam, lo, hi, start, cfg):
    segs = constant_segments(lam, max(lo, cfg.start_radius), hi)
    if start == "center":
        return shoot_from_center(dimension, segs, cfg)
    return integrate_segments(dimension, segs, 0.0, 1.0, cfg)


def _normalize(dimension, sol, lo, hi, cfg):
    nrm2 = radial_integral(lambda r: sol.value(r)**2, dimension,
                           0.0 if lo < cfg.start_radius * 2 else lo, hi,
                           rtol=cfg.quad_rtol)
    s = 1.0 / np.sqrt(nrm2)
    sol.u = sol.u * s
    sol.du = sol.du * s
    sol._spline = None
    return sol


def _bisect_count(dimension, target, lo_lam, hi_lam, lo, hi, start, cfg):
    """Shrink [lo_lam, hi_lam] onto the lam where the zero count reaches target."""
    a, b = lo_lam, hi_lam
    while (b - a) > 1e-12 * max(b, 1.0):
        mid = 0.5 * (a + b)
        sol = _shoot_const(dimension, mid, lo, hi, start, cfg)
        if count_sign_changes(sol.u) >= target:
            b = mid
        else:
            a = mid
    return a, b


def neumann_radial_eigen(dimension: int, index: int, tol: float = 1e-8,
                         cfg: SolverConfig = DEFAULT) -> EigenPair:
    """k-th radial Neumann eigenvalue and eigenfunction of the unit ball.

    Returns the pair (mu_k, phi_k) with phi normalized in the
    r^(N-1)-weighted L^2 sense, positive near the origin, and carrying
    exactly ``index`` refined interior zeros.
    """
    if dimension < 2 or index < 0 or tol <= 0:
        raise ConfigError("need N >= 2, k >= 0, tol > 0")
    if index > cfg.max_eigen_index:
        raise ConfigError(f"index {index} above configured cap "
                          f"{cfg.max_eigen_index}")
    omega = sphere_measure(dimension)
    if index == 0:
        sol = _shoot_const(dimension, 0.0, 0.0, 1.0, "center", cfg)
        sol = locate_zeros(sol, cfg, open_upper=True)
        sol = _normalize(dimension, sol, 0.0, 1.0, cfg)
        return EigenPair(0.0, 0, sol, omega, dimension, "neumann", Ball(1.0))

    # March lam upward until the zero count passes index + 1; the count
    # transition points bracket the Dirichlet neighbours of mu_k.
    counts = {0.0: 0}
    lam = 0.0
    hist = [(0.0, 0)]
    for step in range(cfg.max_scan_steps):
        lam += cfg.scan_step
        sol = _shoot_const(dimension, lam, 0.0, 1.0, "center", cfg)
        c = count_sign_changes(sol.u)
        hist.append((lam, c))
        if c >= index + 1:
            break
    else:
        raise NonConvergence(f"zero count never reached {index + 1} below "
                             f"lam={lam}")

    def transition(target):
        lo_lam = max(l for l, c in hist if c < target)
        hi_lam = min(l for l, c in hist if c >= target)
        return _bisect_count(dimension, target, lo_lam, hi_lam,
                             0.0, 1.0, "center", cfg)

    _, dk_hi = transition(index)          # just above the k-th Dirichlet value
    dk1_lo, _ = transition(index + 1)     # just below the (k+1)-th

    def end_slope(lam):
        return _shoot_const(dimension, lam, 0.0, 1.0, "center", cfg).end_derivative

    a = dk_hi * (1.0 + 1e-9)
    b = dk1_lo * (1.0 - 1e-9)
    fa, fb = end_slope(a), end_slope(b)
    if fa == 0.0:
        mu = a
    elif fb == 0.0:
        mu = b
    elif np.sign(fa) == np.sign(fb):
        raise NonConvergence("terminal slope does not change sign inside the "
                             f"count bracket ({a:.6g}, {b:.6g})")
    else:
        mu = brentq(end_slope, a, b, xtol=1e-13, rtol=cfg.eig_rtol)

    sol = _shoot_const(dimension, mu, 0.0, 1.0, "center", cfg)
    sol = locate_zeros(sol, cfg, open_upper=True)
    if sol.zeros.size != index:
        raise ZeroCountMismatch(
            f"eigenfunction for mu_{index}={mu:.8g} has {sol.zeros.size} zeros")
    sol = _normalize(dimension, sol, 0.0, 1.0, cfg)
    if abs(sol.end_derivative) > tol * max(1.0, np.max(np.abs(sol.du))):
        raise NonConvergence(f"|phi'(1)|={abs(sol.end_derivative):.2e} "
                             f"exceeds tol={tol:g}")
    return EigenPair(float(mu), index, sol, omega, dimension, "neumann",
                     Ball(1.0))


def _first_dirichlet(dimension, lo, hi, start, cfg):
    """First lam with vanishing terminal value for the shot from lo."""
    width2 = (hi - lo) ** 2
    step = cfg.scan_step / width2

    def terminal(lam):
        return _shoot_const(dimension, lam, lo, hi, start, cfg)

    lam_prev, f_prev = 0.0, terminal(0.0).u[-1]
    lam = 0.0
    for _ in range(cfg.max_scan_steps):
        lam += step
        f = terminal(lam).u[-1]
        if f == 0.0 or np.sign(f) != np.sign(f_prev):
            break
        lam_prev, f_prev = lam, f
    else:
        raise NonConvergence(f"no Dirichlet sign change below lam={lam}")

    lam1 = brentq(lambda t: terminal(t).u[-1], lam_prev, lam,
                  xtol=1e-13, rtol=cfg.eig_rtol)
    sol = terminal(lam1)
    sol = locate_zeros(sol, cfg, open_upper=True)
    if sol.zeros.size != 0:
        raise ZeroCountMismatch("first Dirichlet eigenfunction has interior zeros")
    return float(lam1), sol


def dirichlet_ball_lambda1(dimension: int, radius: float,
                           cfg: SolverConfig = DEFAULT):
    """First Dirichlet eigenvalue of the ball B_R with positive eigenfunction."""
    if dimension < 2 or radius <= 0:
        raise ConfigError("need N >= 2, R > 0")
    lam, sol = _first_dirichlet(dimension, 0.0, radius, "center", cfg)
    sol = _normalize(dimension, sol, 0.0, radius, cfg)
    pair = EigenPair(lam, 0, sol, sphere_measure(dimension), dimension,
                     "dirichlet", Ball(radius))
    return lam, pair


def dirichlet_annulus_lambda1(dimension: int, inner: float, outer: float,
                              cfg: SolverConfig = DEFAULT):
    """First Dirichlet eigenvalue of the annulus A(inner, outer)."""
    if not 0 < inner < outer:
        raise ConfigError("need 0 < inner < outer")
    if outer - inner < cfg.min_annulus_width:
        raise DegenerateAnnulus(
            f"width {outer - inner:.3g} below minimum {cfg.min_annulus_width:g}")
    lam, sol = _first_dirichlet(dimension, inner, outer, "edge", cfg)
    sol = _normalize(dimension, sol, inner, outer, cfg)
    pair = EigenPair(lam, 0, sol, sphere_measure(dimension), dimension,
                     "dirichlet", Annulus(inner, outer))
    return lam, pair


def eigen_zeros(pair: EigenPair, cfg: SolverConfig = DEFAULT) -> np.ndarray:
    """Re-derive the interior zeros of a Neumann eigenpair, increasing order."""
    sol = RadialSolution(pair.solution.r, pair.solution.u, pair.solution.du,
                         cfg)
    sol = locate_zeros(sol, cfg, open_upper=True)
    if sol.zeros.size != pair.index:
        raise ZeroCountMismatch(
            f"found {sol.zeros.size} zeros for index {pair.index}")
    return sol.zeros


@functools.lru_cache(maxsize=None)
def neumann_pair(dimension: int, index: int,
                 cfg: SolverConfig = DEFAULT) -> EigenPair:
    """Cached Neumann eigenpair; treat the returned object as read-only."""
    return neumann_radial_eigen(dimension, index, cfg=cfg)


def neumann_eigenvalue(dimension: int, index: int,
                       cfg: SolverConfig = DEFAULT) -> float:
    return neumann_pair(dimension, index, cfg).eigenvalue


def solve(problem: SpectralProblem, index: int = 0,
          cfg: SolverConfig = DEFAULT):
    """Dispatch a SpectralProblem to the matching operation."""
    if problem.bc == "neumann":
        return neumann_radial_eigen(problem.dimension, index, cfg=cfg)
    if isinstance(problem.domain, Ball):
        return dirichlet_ball_lambda1(problem.dimension, problem.domain.radius,
                                      cfg)[1]
    return dirichlet_annulus_lambda1(problem.dimension, problem.domain.inner,
                                     problem.domain.outer, cfg)[1]
