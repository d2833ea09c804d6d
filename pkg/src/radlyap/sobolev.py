"""Rayleigh-quotient embedding constants and the zero-gap thresholds.

The quotient  |grad w|_2^2 / |w|_q^2  with q = 2p/(p-1) is minimized over
zero-boundary profiles two independent ways: projected gradient descent on
a discretized profile, and shooting on the radial Euler-Lagrange equation
-(r^(N-1) w')' = lam r^(N-1) w^(q-1).  Their agreement certifies the value;
the interval analogue uses the same machinery with the weight exponent set
to zero.  The critical exponent q = 2N/(N-2) is handled separately by
evaluating the quotient along a concentrating profile family, since the
infimum is not attained there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import _kernels
from .config import DEFAULT, SolverConfig
from .errors import ConfigError, MethodDisagreement, NonConvergence
from .quadrature import integrate, sphere_measure
from .shooting import segment_grid


def exponent_q(p: float) -> float:
    if p <= 1:
        raise ConfigError("need p > 1 for a finite dual exponent")
    return 2.0 * p / (p - 1.0)


@dataclass(frozen=True)
class SobolevQuery:
    """One constant request; q is derived from p."""

    dimension: int
    p: float
    method: str = "both"   # "descent" | "shooting" | "both"

    def __post_init__(self):
        if self.dimension < 2:
            raise ConfigError("dimension must be >= 2")
        if not self.p > self.dimension / 2:
            raise ConfigError("need p > N/2 for a subcritical exponent")

    @property
    def q(self) -> float:
        return exponent_q(self.p)


# -- method (i): discretized minimization ------------------------------------

def _descent_quotient(q: float, weight_exp: int, lo: float, hi: float,
                      zero_left: bool, grid_points: int = 2001,
                      tol: float = 1e-12, max_iter: int = 5000):
    """Minimize the discrete quotient by normalized gradient iteration.

    The gradient is preconditioned with the (tridiagonal) stiffness matrix
    of the numerator, which removes the severe ill-conditioning the
    r^(N-1) weight induces near the origin; steps halve on non-decrease
    and the run stops once the accepted relative improvement stays below
    ``tol``.  The iteration is run on the unit sphere of the discrete
    q-norm (the quotient is scale-invariant).
    """
    from scipy.linalg import solveh_banded

    M = grid_points - 1
    r = np.linspace(lo, hi, grid_points)
    h = (hi - lo) / M
    mid = (0.5 * (r[:-1] + r[1:])) ** weight_exp
    wnode = r**weight_exp * h
    trap = np.ones(grid_points)
    trap[0] = trap[-1] = 0.5
    wnode = wnode * trap

    free_lo = 1 if zero_left else 0
    nfree = M - free_lo
    ab = np.zeros((2, nfree))
    diag = np.empty(grid_points)
    diag[0] = mid[0]
    diag[1:-1] = mid[:-1] + mid[1:]
    diag[-1] = mid[-1]
    ab[1] = diag[free_lo:M] / h
    ab[0, 1:] = -mid[free_lo:M - 1] / h

    w = np.sin(np.pi * (r - lo) / (hi - lo)) if zero_left \
        else 1.0 - ((r - lo) / (hi - lo)) ** 2
    w[-1] = 0.0
    if zero_left:
        w[0] = 0.0

    def split(w):
        d = np.diff(w)
        num = float(np.sum(mid * d * d)) / h
        den = float(np.sum(wnode * np.abs(w) ** q))
        return num, den

    def project(w):
        num, den = split(w)
        s = den ** (1.0 / q)
        return w / s, num / s**2

    w, quot = project(w)
    step = 1.0
    stall = 0
    for _ in range(max_iter):
        d = np.diff(w)
        gnum = np.zeros_like(w)
        gnum[:-1] -= 2.0 * mid * d / h
        gnum[1:] += 2.0 * mid * d / h
        gden = q * wnode * np.abs(w) ** (q - 1.0) * np.sign(w)
        grad = gnum - (2.0 / q) * quot * gden   # den == 1 on the sphere
        direction = np.zeros_like(w)
        direction[free_lo:M] = solveh_banded(ab, grad[free_lo:M])
        improved = False
        rel = 0.0
        while step > 1e-14:
            trial = np.abs(w - step * direction)
            trial[-1] = 0.0
            if zero_left:
                trial[0] = 0.0
            trial, qt = project(trial)
            if qt < quot:
                rel = (quot - qt) / quot
                w, quot = trial, qt
                step = min(step * 1.25, 1.0)
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        if rel < tol:
            stall += 1
            if stall >= 5:
                break
        else:
            stall = 0
    return quot, r, w


# -- method (ii): Euler-Lagrange shooting -------------------------------------

def _el_profile(dim_eff: int, q: float, lam: float, lo: float, hi: float,
                cfg: SolverConfig):
    """Integrate the EL equation with u(lo)=1,u'(lo)=0 (ball) or 0,1 (edge)."""
    rhalf, chalf = segment_grid(lo, hi, max(lam, 1.0), dim_eff, cfg)
    n = (rhalf.size - 1) // 2
    out_u = np.empty(n + 1)
    out_v = np.empty(n + 1)
    if lo > 0.0:
        if dim_eff >= 2:
            u0 = 1.0 - lam * lo * lo / (2.0 * dim_eff)
            v0 = -lam * lo / dim_eff
        else:
            u0, v0 = 0.0, 1.0
    else:
        u0, v0 = 0.0, 1.0
    bad = _kernels.shoot_power_rk4(rhalf, chalf, lam, q - 1.0, u0, v0,
                                   out_u, out_v)
    if bad:
        raise NonConvergence("EL integration blew up")
    return rhalf[0::2], out_u, out_v


def _first_zero_gap(r, u, hi):
    """Positive terminal value, or -(distance of first zero from hi)."""
    neg = np.nonzero(u < 0.0)[0]
    if neg.size == 0:
        return float(u[-1])
    i = neg[0]
    z = r[i - 1] + (r[i] - r[i - 1]) * u[i - 1] / (u[i - 1] - u[i])
    return -(hi - z)


def _el_quotient(dimension: int, q: float, lo: float, hi: float,
                 cfg: SolverConfig, weight_exp: int):
    """Shoot the multiplier so the positive profile first vanishes at hi."""
    dim_eff = weight_exp + 1

    def G(lam):
        r, u, _ = _el_profile(dim_eff, q, lam, lo, hi, cfg)
        return _first_zero_gap(r, u, hi)

    lam_lo = 1.0
    while G(lam_lo) < 0.0:
        lam_lo *= 0.5
        if lam_lo < 1e-12:
            raise NonConvergence("no positive-profile multiplier found")
    lam_hi = 2.0 * lam_lo
    while G(lam_hi) > 0.0:
        lam_hi *= 2.0
        if lam_hi > 1e12:
            raise NonConvergence("profile never reaches the boundary")
    for _ in range(80):
        lam = 0.5 * (lam_lo + lam_hi)
        if G(lam) > 0.0:
            lam_lo = lam
        else:
            lam_hi = lam
        if (lam_hi - lam_lo) <= cfg.eig_rtol * lam_hi:
            break
    lam = 0.5 * (lam_lo + lam_hi)

    r, u, v = _el_profile(dim_eff, q, lam, lo, hi, cfg)
    u = np.maximum(u, 0.0)
    uspl = CubicHermiteSpline(r, u, v)
    c = np.zeros_like(r) if weight_exp == 0 else weight_exp / r
    vprime = -(c * v + lam * np.abs(u) ** (q - 1.0) * np.sign(u))
    vspl = CubicHermiteSpline(r, v, vprime)
    A = integrate(lambda x: x**weight_exp * vspl(x) ** 2, lo, hi,
                  rtol=cfg.quad_rtol)
    B = integrate(lambda x: x**weight_exp * np.abs(uspl(x)) ** q, lo, hi,
                  rtol=cfg.quad_rtol)
    return A / B ** (2.0 / q)


# -- public constants ---------------------------------------------------------

def alpha_constant_methods(dimension: int, p: float, radius: float = 1.0,
                           cfg: SolverConfig = DEFAULT,
                           grid_points: int = 2001):
    """(descent, shooting) values of the radial ball quotient constant."""
    if not p > dimension / 2:
        raise ConfigError("need p > N/2")
    q = exponent_q(p)
    omega = sphere_measure(dimension)
    pre = omega ** (1.0 - 2.0 / q)
    d, _, _ = _descent_quotient(q, dimension - 1, 0.0, radius, False,
                                grid_points)
    s = _el_quotient(dimension, q, cfg.start_radius, radius, cfg,
                     dimension - 1)
    return pre * d, pre * s


def alpha_constant(dimension: int, p: float, cfg: SolverConfig = DEFAULT,
                   method_rtol: float = 1e-3) -> float:
    """Minimized radial quotient |grad w|^2 / |w|_q^2 over the unit ball.

    Both independent methods must agree within ``method_rtol``; the smaller
    of the two upper bounds is returned.
    """
    d, s = alpha_constant_methods(dimension, p, 1.0, cfg)
    if abs(d - s) > method_rtol * max(d, s):
        raise MethodDisagreement(f"ball quotient: descent={d:.8g} "
                                 f"shooting={s:.8g}")
    return min(d, s)


def c_p_interval_methods(p: float, z1: float = 0.0, z2: float = 1.0,
                         cfg: SolverConfig = DEFAULT,
                         grid_points: int = 2001):
    """(descent, shooting) values of the one-dimensional quotient constant."""
    q = exponent_q(p)
    d, _, _ = _descent_quotient(q, 0, z1, z2, True, grid_points)
    s = _el_quotient(1, q, z1, z2, cfg, 0)
    return d, s


def c_p_interval(p: float, cfg: SolverConfig = DEFAULT,
                 method_rtol: float = 1e-3) -> float:
    """Minimized 1-D quotient |w'|_2^2 / |w|_q^2 on (0, 1), two-method checked."""
    d, s = c_p_interval_methods(p, 0.0, 1.0, cfg)
    if abs(d - s) > method_rtol * max(d, s):
        raise MethodDisagreement(f"interval quotient: descent={d:.8g} "
                                 f"shooting={s:.8g}")
    return min(d, s)


@dataclass(frozen=True)
class GapBounds:
    """Zero-location and zero-gap thresholds for a given norm budget.

    Any solution zero z of an admissible potential with |a|_p <= M
    satisfies z >= epsilon1, and distinct zeros are at least epsilon2
    apart; the stored values are the supremum thresholds.
    """

    M: float
    epsilon1: float
    epsilon2: float
    alpha: float
    c_p: float


def gap_bounds(dimension: int, p: float, M: float,
               cfg: SolverConfig = DEFAULT) -> GapBounds:
    if M <= 0:
        raise ConfigError("norm budget must be positive")
    a = alpha_constant(dimension, p, cfg)
    cp = c_p_interval(p, cfg)
    omega = sphere_measure(dimension)
    eps1 = (a / M) ** (p / (2.0 * p - dimension))
    eps2 = (omega ** (1.0 / p) * eps1 ** (dimension - 1) * cp / M) \
        ** (p / (2.0 * p - 1.0))
    return GapBounds(M, eps1, eps2, a, cp)


# -- critical exponent --------------------------------------------------------

def _cutoff_t(s):
    return 1.0 / (1.0 - s) - 1.0 / s


def _cutoff(r):
    """Smooth radial bump: 1 on [0, 1/2], 0 at 1 (stable logistic form)."""
    r = np.asarray(r, dtype=float)
    out = np.ones_like(r)
    s = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    m = (s > 0.0) & (s < 1.0)
    t = np.clip(_cutoff_t(s[m]), -700.0, 700.0)
    out[m] = np.where(t > 0.0,
                      np.exp(-np.minimum(t, 700.0)) / (1.0 + np.exp(-np.minimum(t, 700.0))),
                      1.0 / (1.0 + np.exp(np.minimum(t, 0.0))))
    out[s >= 1.0] = 0.0
    return out


def _cutoff_prime(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    s = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    m = (s > 0.0) & (s < 1.0)
    sm = s[m]
    t = _cutoff_t(sm)
    # chi' = -2 t'(s) chi (1 - chi); vanishes to all orders at both edges
    inner = np.abs(t) < 40.0
    val = np.zeros_like(sm)
    ti = t[inner]
    chi = 1.0 / (1.0 + np.exp(ti))
    tprime = 1.0 / (1.0 - sm[inner]) ** 2 + 1.0 / sm[inner] ** 2
    val[inner] = -2.0 * tprime * chi * (1.0 - chi)
    out[m] = val
    return out


@dataclass
class CriticalEstimate:
    """Concentration-family estimate of the critical quotient infimum."""

    value: float
    attained: bool
    lambdas: list = field(default_factory=list)
    quotients: list = field(default_factory=list)
    slope: float = 0.0


def _critical_quotient(dimension: int, lam: float,
                       cfg: SolverConfig = DEFAULT) -> float:
    N = dimension
    qc = 2.0 * N / (N - 2.0)
    omega = sphere_measure(N)
    expo = (N - 2.0) / 2.0

    def w(r):
        return (1.0 + (lam * r) ** 2) ** (-expo) * _cutoff(r)

    def wp(r):
        base = (1.0 + (lam * r) ** 2) ** (-expo)
        dbase = -expo * 2.0 * lam**2 * r * (1.0 + (lam * r) ** 2) ** (-expo - 1.0)
        return dbase * _cutoff(r) + base * _cutoff_prime(r)

    A = omega * integrate(lambda r: r ** (N - 1) * wp(r) ** 2, 0.0, 1.0,
                          rtol=cfg.quad_rtol, breakpoints=[0.5])
    B = omega * integrate(lambda r: r ** (N - 1) * np.abs(w(r)) ** qc, 0.0,
                          1.0, rtol=cfg.quad_rtol, breakpoints=[0.5])
    return A / B ** (2.0 / qc)


def critical_constant(dimension: int,
                      cfg: SolverConfig = DEFAULT) -> CriticalEstimate:
    """Extrapolated infimum of the critical quotient; never attained.

    The quotient is evaluated along a concentrating family and fitted
    linearly against 1/lam^(N-2) on the three largest parameters; the
    intercept estimates the infimum.
    """
    if dimension < 3:
        raise ConfigError("critical exponent needs N >= 3")
    lambdas = [float(2**j) for j in range(7)]
    quotients = [_critical_quotient(dimension, lam, cfg) for lam in lambdas]
    x = np.asarray([1.0 / lam ** (dimension - 2) for lam in lambdas[-3:]])
    y = np.asarray(quotients[-3:])
    slope, intercept = np.polyfit(x, y, 1)
    return CriticalEstimate(float(intercept), False, lambdas, quotients,
                            float(slope))
