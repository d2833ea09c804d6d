"""Explicit admissible potential families with small L^p distance to mu_k.

Two constructions are provided.  For N >= 3 the potential takes the three
constant values mu_k, lambda_1(annulus(eps, r_k)), lambda_1(ball(eps)) and
the solution glues the eigenfunction tail to the two Dirichlet ground
states, C^1-matched at the shared zeros.  For N = 2 the inner ball piece is
replaced by the bounded two-branch profile pair (v_alpha, A_alpha), whose
rescaling A_alpha(r/eps)/eps^2 has uniformly small integral as alpha -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT, SolverConfig
from .errors import ConfigError, GluingFailure, MembershipFailure
from .potentials import (ClosedFormPiece, ConstantPiece, RadialPotential,
                         register_closed_form)
from .quadrature import radial_integral, sphere_measure
from .shooting import RadialSolution, constant_segments, integrate_segments, \
    locate_zeros, segment_grid
from .spectra import dirichlet_annulus_lambda1, dirichlet_ball_lambda1, \
    neumann_pair


# -- planar closed forms ------------------------------------------------------

def _log_ratio(r):
    """(-log r) / (1 - r^2), stable through r = 1 where it tends to 1/2."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    d = 1.0 - r
    near = np.abs(d) < 1e-4
    far = ~near
    out[far] = -np.log(r[far]) / (1.0 - r[far] ** 2)
    dn = d[near]
    out[near] = (1.0 + dn / 2 + dn**2 / 3 + dn**3 / 4) / (1.0 + r[near])
    return out


def _two_branch(alpha, r, outer_fn, inner_fn):
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    m = r >= alpha
    out[m] = outer_fn(r[m])
    out[~m] = inner_fn(r[~m])
    return out


def planar_v_alpha(alpha: float, r):
    """Positive two-branch profile vanishing at r = 1 (dimension two)."""
    return _two_branch(
        alpha, r,
        lambda s: alpha * (1 - s**2) * (3 - s**2) - np.log(s),
        lambda s: alpha * (1 - s**2) * (3 - s**2) - math.log(alpha)
        + (alpha**2 - s**2) / (2 * alpha**2))


def planar_v_alpha_prime(alpha: float, r):
    return _two_branch(
        alpha, r,
        lambda s: alpha * (-8 * s + 4 * s**3) - 1.0 / s,
        lambda s: alpha * (-8 * s + 4 * s**3) - s / alpha**2)


def planar_A_alpha(alpha: float, r):
    """Bounded coefficient with A v = -Lap v; jumps across r = alpha."""
    # outer branch rewritten as 16a / (a (3 - r^2) + (-log r)/(1 - r^2)),
    # which stays finite through r = 1
    return _two_branch(
        alpha, r,
        lambda s: 16 * alpha / (alpha * (3 - s**2) + _log_ratio(s)),
        lambda s: (16 * alpha * (1 - s**2) + 2 / alpha**2)
        / (alpha * (1 - s**2) * (3 - s**2) - math.log(alpha)
           + (alpha**2 - s**2) / (2 * alpha**2)))


def planar_laplacian_v_alpha(alpha: float, r):
    """Two-dimensional radial Laplacian of the profile, in closed form."""
    return _two_branch(
        alpha, r,
        lambda s: -16 * alpha * (1 - s**2),
        lambda s: -16 * alpha * (1 - s**2) - 2 / alpha**2)


def planar_m_alpha(alpha: float, grid_points: int = 10000) -> float:
    """Infimum of A_alpha over (0, 1], by branch-wise grid scan + refinement."""
    if not 0 < alpha < 1:
        raise ConfigError("alpha must be in (0, 1)")
    best = math.inf
    for lo, hi in ((1e-12, alpha), (alpha, 1.0)):
        n = max(16, int(grid_points * (hi - lo)))
        grid = np.linspace(lo, hi, n)
        vals = planar_A_alpha(alpha, grid)
        i = int(np.argmin(vals))
        best = min(best, float(vals[i]))
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, n - 1)]
        if b > a:
            res = minimize_scalar(lambda x: float(planar_A_alpha(alpha, x)),
                                  bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12})
            best = min(best, float(res.fun))
    return best


def _planar_bump_eval(params, r):
    eps = params["scale"]
    return planar_A_alpha(params["alpha"], np.asarray(r) / eps) / eps**2


def _planar_bump_breaks(params, lo, hi):
    b = params["alpha"] * params["scale"]
    return [b] if lo < b < hi else []


def _planar_bump_sup(params, lo, hi):
    eps = params["scale"]
    grid = np.linspace(max(lo, 1e-9), hi, 4097)
    return float(np.max(_planar_bump_eval(params, grid))) * 1.05


register_closed_form("planar_bump", _planar_bump_eval, _planar_bump_breaks,
                     _planar_bump_sup)


# -- glued families -----------------------------------------------------------

@dataclass(frozen=True)
class SubcriticalFamilyParams:
    dimension: int
    level: int
    epsilon: float

    def __post_init__(self):
        if self.dimension < 3:
            raise ConfigError("subcritical family needs N >= 3")
        if self.level < 1:
            raise ConfigError("family constructions cover k >= 1 only")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")


@dataclass(frozen=True)
class PlanarFamilyParams:
    alpha: float
    level: int
    epsilon: Optional[float] = None   # None selects the default rule

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must be in (0, 1)")
        if self.level < 1:
            raise ConfigError("family constructions cover k >= 1 only")


@dataclass
class GluedSolution:
    potential: RadialPotential
    solution: RadialSolution
    interfaces: list
    value_mismatch: float
    derivative_mismatch: float
    info: dict


def _eigen_tail(dimension, index, cfg):
    """Eigenfunction restricted to [r_k, 1], re-shot from its smallest zero."""
    pair = neumann_pair(dimension, index, cfg)
    r_k = float(pair.zeros[0])
    dphi = float(pair.derivative(r_k))
    tail = integrate_segments(dimension,
                              constant_segments(pair.eigenvalue, r_k, 1.0),
                              0.0, dphi, cfg)
    return pair, r_k, dphi, tail


def _scaled(sol: RadialSolution, s: float, cfg) -> RadialSolution:
    return RadialSolution(sol.r, sol.u * s, sol.du * s, cfg)


def _assemble(pieces_rs, cfg) -> RadialSolution:
    rs = [pieces_rs[0].r] + [p.r[1:] for p in pieces_rs[1:]]
    us = [pieces_rs[0].u] + [p.u[1:] for p in pieces_rs[1:]]
    vs = [pieces_rs[0].du] + [p.du[1:] for p in pieces_rs[1:]]
    sol = RadialSolution(np.concatenate(rs), np.concatenate(us),
                         np.concatenate(vs), cfg)
    return locate_zeros(sol, cfg, open_upper=True)


def build_subcritical_family(params: SubcriticalFamilyParams,
                             cfg: SolverConfig = DEFAULT) -> GluedSolution:
    """Three-piece constant potential and its C^1-glued solution (N >= 3)."""
    N, k, eps = params.dimension, params.level, params.epsilon
    pair, r_k, dphi, tail = _eigen_tail(N, k, cfg)
    if not eps < r_k:
        raise ConfigError(f"epsilon must lie in (0, r_k={r_k:.6g})")

    lam_ann, ann = dirichlet_annulus_lambda1(N, eps, r_k, cfg)
    lam_ball, ball = dirichlet_ball_lambda1(N, eps, cfg)

    dmax_ann = float(np.max(np.abs(ann.solution.du)))
    dmax_ball = float(np.max(np.abs(ball.solution.du)))
    if abs(ann.solution.du[-1]) < cfg.gluing_floor * dmax_ann \
            or abs(ball.solution.du[-1]) < cfg.gluing_floor * dmax_ball:
        raise GluingFailure("interface derivative numerically zero")

    s_ann = dphi / float(ann.solution.du[-1])
    s_ball = s_ann * float(ann.solution.du[0]) / float(ball.solution.du[-1])

    glued = _assemble([_scaled(ball.solution, s_ball, cfg),
                       _scaled(ann.solution, s_ann, cfg), tail], cfg)

    potential = RadialPotential(N, [
        ConstantPiece(0.0, eps, lam_ball),
        ConstantPiece(eps, r_k, lam_ann),
        ConstantPiece(r_k, 1.0, pair.eigenvalue),
    ], level=k)

    v_mis = max(abs(s_ball * float(ball.solution.u[-1])),
                abs(s_ann * float(ann.solution.u[-1])))
    d_mis = max(abs(s_ball * float(ball.solution.du[-1])
                    - s_ann * float(ann.solution.du[0])),
                abs(s_ann * float(ann.solution.du[-1]) - dphi))
    return GluedSolution(potential, glued, [eps, r_k], v_mis, d_mis, {
        "mu_k": pair.eigenvalue, "lambda_annulus": lam_ann,
        "lambda_ball": lam_ball, "r_k": r_k,
        "scales": (s_ball, s_ann, 1.0), "params": params,
    })


class NormPair(NamedTuple):
    closed_form: float
    quadrature: float


def subcritical_norm(params: SubcriticalFamilyParams, p: float,
                     cfg: SolverConfig = DEFAULT,
                     glued: Optional[GluedSolution] = None) -> NormPair:
    """Weighted L^p distance of the family potential to mu_k, both routes.

    The closed form sums the two inner shells exactly; the quadrature route
    integrates |a - mu_k|^p against omega_N r^(N-1) dr independently.
    """
    if not p >= 1 or math.isinf(p):
        raise ConfigError("need 1 <= p < inf")
    if glued is None:
        glued = build_subcritical_family(params, cfg)
    N = params.dimension
    omega = sphere_measure(N)
    mu = glued.info["mu_k"]
    lam_ann = glued.info["lambda_annulus"]
    lam_ball = glued.info["lambda_ball"]
    r_k = glued.info["r_k"]
    eps = params.epsilon
    closed = ((lam_ball - mu) ** p * omega * eps**N / N
              + (lam_ann - mu) ** p * omega * (r_k**N - eps**N) / N) ** (1.0 / p)

    pot = glued.potential
    quad = radial_integral(lambda r: np.abs(pot.evaluate(r) - mu) ** p,
                           N, 0.0, 1.0, rtol=cfg.quad_rtol,
                           breakpoints=pot.breakpoints()) ** (1.0 / p)
    return NormPair(closed, quad)


def default_planar_epsilon(alpha: float, level: int,
                           cfg: SolverConfig = DEFAULT) -> float:
    """Largest comfortable eps: half of r_k, capped by the membership rule."""
    pair = neumann_pair(2, level, cfg)
    r_k = float(pair.zeros[0])
    m = planar_m_alpha(alpha)
    return min(r_k / 2.0, 0.9 * math.sqrt(m / pair.eigenvalue))


def build_planar_family(params: PlanarFamilyParams,
                        cfg: SolverConfig = DEFAULT) -> GluedSolution:
    """Planar (N = 2) family with the rescaled bounded bump on the core."""
    alpha, k = params.alpha, params.level
    pair, r_k, dphi, tail = _eigen_tail(2, k, cfg)
    mu = pair.eigenvalue
    m = planar_m_alpha(alpha)
    eps = params.epsilon if params.epsilon is not None \
        else default_planar_epsilon(alpha, k, cfg)
    if eps >= r_k:
        raise ConfigError(f"epsilon must lie in (0, r_k={r_k:.6g})")
    if m / eps**2 < mu:
        raise MembershipFailure(
            f"m_alpha/eps^2 = {m / eps**2:.6g} < mu_{k} = {mu:.6g}")

    lam_ann, ann = dirichlet_annulus_lambda1(2, eps, r_k, cfg)
    dmax_ann = float(np.max(np.abs(ann.solution.du)))
    if abs(ann.solution.du[-1]) < cfg.gluing_floor * dmax_ann:
        raise GluingFailure("interface derivative numerically zero")
    s_ann = dphi / float(ann.solution.du[-1])

    # core piece evaluated analytically on a shooting-style grid, split at
    # the branch radius alpha*eps where the coefficient jumps
    dv1 = -4.0 * alpha - 1.0          # v_alpha'(1)
    s_core = s_ann * float(ann.solution.du[0]) * eps / dv1
    sup_core = _planar_bump_sup({"alpha": alpha, "scale": eps}, 0.0, eps)
    nodes = []
    for lo, hi in ((cfg.start_radius, alpha * eps), (alpha * eps, eps)):
        rhalf, _ = segment_grid(lo, hi, sup_core, 2, cfg)
        part = rhalf[0::2]
        nodes.append(part if not nodes else part[1:])
    rcore = np.concatenate(nodes)
    core = RadialSolution(
        rcore,
        s_core * planar_v_alpha(alpha, rcore / eps),
        s_core * planar_v_alpha_prime(alpha, rcore / eps) / eps,
        cfg)

    glued = _assemble([core, _scaled(ann.solution, s_ann, cfg), tail], cfg)

    potential = RadialPotential(2, [
        ClosedFormPiece(0.0, eps, "planar_bump",
                        {"alpha": alpha, "scale": eps}),
        ConstantPiece(eps, r_k, lam_ann),
        ConstantPiece(r_k, 1.0, mu),
    ], level=k)

    v_mis = max(abs(float(core.u[-1])),
                abs(s_ann * float(ann.solution.u[-1])))
    d_mis = max(abs(float(core.du[-1]) - s_ann * float(ann.solution.du[0])),
                abs(s_ann * float(ann.solution.du[-1]) - dphi))
    return GluedSolution(potential, glued, [eps, r_k], v_mis, d_mis, {
        "mu_k": mu, "lambda_annulus": lam_ann, "m_alpha": m, "r_k": r_k,
        "epsilon": eps, "scales": (s_core, s_ann, 1.0), "params": params,
    })


class PlanarNorm(NamedTuple):
    value: float              # quadrature L^1 distance of the potential to mu_k
    bound: float              # closed-form majorant incl. the annulus shell
    core_integral: float      # integral of A_alpha over the unit ball
    epsilon: float
    lambda_annulus: float


def planar_a_alpha_integral(alpha: float, rtol: float = 1e-9) -> float:
    """Integral of A_alpha over the unit two-dimensional ball."""
    return radial_integral(lambda r: planar_A_alpha(alpha, r), 2, 0.0, 1.0,
                           rtol=rtol, breakpoints=[alpha])


def planar_bound(alpha: float) -> float:
    """Closed-form majorant of the core integral."""
    return math.pi * (16 * alpha**3 + 2) / (-math.log(alpha)) \
        + 32 * math.pi * alpha * (1 - alpha**2)


def planar_l1_norm(params: PlanarFamilyParams, cfg: SolverConfig = DEFAULT,
                   glued: Optional[GluedSolution] = None) -> PlanarNorm:
    """L^1 distance of the planar family to mu_k, with its printed majorant."""
    if glued is None:
        glued = build_planar_family(params, cfg)
    mu = glued.info["mu_k"]
    lam_ann = glued.info["lambda_annulus"]
    r_k = glued.info["r_k"]
    eps = glued.info["epsilon"]
    pot = glued.potential
    value = radial_integral(lambda r: np.abs(pot.evaluate(r) - mu), 2,
                            0.0, 1.0, rtol=cfg.quad_rtol,
                            breakpoints=pot.breakpoints())
    bound = planar_bound(params.alpha) \
        + (lam_ann - mu) * math.pi * (r_k**2 - eps**2)
    return PlanarNorm(value, bound, planar_a_alpha_integral(params.alpha),
                      eps, lam_ann)


def linf_constant(dimension: int, index: int,
                  cfg: SolverConfig = DEFAULT) -> float:
    """Exact sup-norm constant: the gap to the next radial eigenvalue."""
    return neumann_pair(dimension, index + 1, cfg).eigenvalue \
        - neumann_pair(dimension, index, cfg).eigenvalue


def linf_witness(dimension: int, index: int,
                 cfg: SolverConfig = DEFAULT) -> RadialPotential:
    """The constant potential attaining the sup-norm constant."""
    return RadialPotential.constant(
        dimension, neumann_pair(dimension, index + 1, cfg).eigenvalue,
        level=index)
