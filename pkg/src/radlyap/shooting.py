"""Shooting machinery for the radial equation u'' + ((N-1)/r) u' + a(r) u = 0.

Integration runs on deterministic grids: a geometric initial layer where
the step is capped at ``ramp_factor * r`` (explicit steps would otherwise be
unstable against the singular first-order term), followed by uniform steps
bounded both by ``max_step`` and by ``freq_step_factor / sqrt(sup a)`` so the
per-step truncation error stays near 1e-10 regardless of how large the
coefficient is.  Segment boundaries of piecewise potentials are grid nodes,
so discontinuities never fall inside a step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import _kernels
from .config import DEFAULT, SolverConfig
from .errors import AmbiguousZero, StepFailure

Segment = tuple  # (lo, hi, a_eval, sup_a); a_eval maps ndarray -> ndarray

_GRID_CACHE: dict = {}
_GRID_CACHE_CAP = 512

_GL5_T, _GL5_W = np.polynomial.legendre.leggauss(5)
_GL5_T = 0.5 * (_GL5_T + 1.0)   # nodes on [0, 1]
_GL5_W = 0.5 * _GL5_W


def _quantize_sup(sup_a: float) -> float:
    """Round the coefficient bound up to a power of two for grid caching."""
    s = max(abs(sup_a), 1.0)
    return float(2.0 ** math.ceil(math.log2(s)))


def _build_nodes(lo: float, hi: float, h_cap: float, ramp: float) -> np.ndarray:
    nodes = [lo]
    r = lo
    # geometric layer: grow until the stability cap stops binding (skipped
    # for lo = 0, which only occurs when there is no singular term)
    while r > 0.0 and ramp * r < h_cap and r + ramp * r < hi:
        r = r + ramp * r
        nodes.append(r)
    n = max(1, int(math.ceil((hi - r) / h_cap)))
    tail = r + (hi - r) * np.arange(1, n + 1) / n
    return np.concatenate([np.asarray(nodes), tail])


def segment_grid(lo: float, hi: float, sup_a: float, dimension: int,
                 cfg: SolverConfig = DEFAULT):
    """Interleaved (node, midpoint) grid and (N-1)/r values for one segment."""
    aq = _quantize_sup(sup_a)
    key = (lo.hex() if isinstance(lo, float) else lo, float(hi).hex(), aq,
           dimension, cfg.max_step, cfg.freq_step_factor, cfg.ramp_factor)
    hit = _GRID_CACHE.get(key)
    if hit is not None:
        return hit
    h_cap = min(cfg.max_step, cfg.freq_step_factor / math.sqrt(aq))
    nodes = _build_nodes(float(lo), float(hi), h_cap, cfg.ramp_factor)
    rhalf = np.empty(2 * nodes.size - 1)
    rhalf[0::2] = nodes
    rhalf[1::2] = 0.5 * (nodes[:-1] + nodes[1:])
    if dimension > 1:
        chalf = (dimension - 1) / rhalf
    else:
        chalf = np.zeros_like(rhalf)
    if len(_GRID_CACHE) >= _GRID_CACHE_CAP:
        _GRID_CACHE.clear()
    _GRID_CACHE[key] = (rhalf, chalf)
    return rhalf, chalf


@dataclass
class RadialSolution:
    """Sampled radial solution with derivative samples.

    ``zeros`` holds the refined interior zeros in increasing order; it is
    filled by :func:`locate_zeros` (eagerly by the public shooting entry
    points).  ``boundary_zero`` records a vanishing outer endpoint, which is
    counted separately from the interior zeros.
    """

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    config: SolverConfig
    zeros: np.ndarray = field(default_factory=lambda: np.empty(0))
    boundary_zero: bool = False
    _spline: Optional[CubicHermiteSpline] = field(default=None, repr=False)

    @property
    def end_derivative(self) -> float:
        return float(self.du[-1])

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.r, self.u, self.du])

    def spline(self) -> CubicHermiteSpline:
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.r, self.u, self.du)
        return self._spline

    def value(self, x):
        return self.spline()(x)

    def derivative(self, x):
        return self.spline().derivative()(x)


def integrate_segments(dimension: int, segments: Sequence[Segment],
                       u0: float, v0: float,
                       cfg: SolverConfig = DEFAULT) -> RadialSolution:
    """Integrate outward across contiguous segments from the first one's lo."""
    rs, us, vs = [], [], []
    u, v = float(u0), float(v0)
    first = True
    for lo, hi, a_eval, sup_a in segments:
        rhalf, chalf = segment_grid(lo, hi, sup_a, dimension, cfg)
        # sample the coefficient one-sidedly: a piecewise coefficient may jump
        # exactly at a segment edge, and each segment owns its own limit
        r_eval = rhalf.copy()
        width = rhalf[-1] - rhalf[0]
        r_eval[0] += 1e-12 * width
        r_eval[-1] -= 1e-12 * width
        ahalf = np.asarray(a_eval(r_eval), dtype=float)
        if not np.all(np.isfinite(ahalf)):
            raise StepFailure(f"coefficient not finite on ({lo}, {hi})")
        n = (rhalf.size - 1) // 2
        out_u = np.empty(n + 1)
        out_v = np.empty(n + 1)
        bad = _kernels.shoot_rk4(rhalf, chalf, ahalf, u, v, out_u, out_v)
        if bad:
            raise StepFailure(
                f"integration failed at r={rhalf[2 * (bad - 1)]:.6g}")
        keep = slice(None) if first else slice(1, None)
        rs.append(rhalf[0::2][keep])
        us.append(out_u[keep])
        vs.append(out_v[keep])
        u, v = float(out_u[-1]), float(out_v[-1])
        first = False
    return RadialSolution(np.concatenate(rs), np.concatenate(us),
                          np.concatenate(vs), cfg)


def taylor_start(dimension: int, a0: float, r0: float, scale: float = 1.0):
    """Second-order series data of the regular solution near the origin."""
    u0 = scale * (1.0 - a0 * r0 * r0 / (2.0 * dimension))
    v0 = -scale * a0 * r0 / dimension
    return u0, v0


def shoot_from_center(dimension: int, segments: Sequence[Segment],
                      cfg: SolverConfig = DEFAULT,
                      scale: float = 1.0) -> RadialSolution:
    """Shoot outward from the origin with the regularizing Taylor start."""
    r0 = cfg.start_radius
    segs = [(max(lo, r0), hi, f, s) for lo, hi, f, s in segments if hi > r0]
    lo0, _, a_eval0, _ = segs[0]
    a0 = float(np.asarray(a_eval0(np.asarray([lo0])))[0])
    u0, v0 = taylor_start(dimension, a0, lo0, scale)
    return integrate_segments(dimension, segs, u0, v0, cfg)


def constant_segments(value: float, lo: float, hi: float) -> list:
    v = float(value)
    return [(lo, hi, lambda r, _v=v: np.full_like(r, _v), abs(v))]


def count_sign_changes(u: np.ndarray) -> int:
    s = np.sign(u)
    nz = s[s != 0]
    return int(np.count_nonzero(nz[1:] * nz[:-1] < 0))


def _hermite(r0, u0, v0, r1, u1, v1):
    h = r1 - r0

    def f(x):
        t = (x - r0) / h
        t2 = t * t
        t3 = t2 * t
        return ((2 * t3 - 3 * t2 + 1) * u0 + h * (t3 - 2 * t2 + t) * v0
                + (-2 * t3 + 3 * t2) * u1 + h * (t3 - t2) * v1)

    return f


def locate_zeros(sol: RadialSolution, cfg: SolverConfig = DEFAULT,
                 open_upper: bool = False) -> RadialSolution:
    """Refine all interior zeros by bracketed root-finding on the samples.

    Sample grids are dense enough that consecutive samples bracket at most
    one sign change.  An interval where the solution hovers below the
    ambiguity floor without changing sign is reported, not guessed.
    """
    r, u, v = sol.r, sol.u, sol.du
    umax = float(np.max(np.abs(u)))
    vmax = float(np.max(np.abs(v)))
    if umax == 0.0:
        raise StepFailure("identically zero solution")

    small = np.abs(u) < cfg.ambiguous_floor * umax
    zeros = []
    i = 0
    n = u.size
    while i < n - 1:
        if small[i]:
            j = i
            while j < n and small[j]:
                j += 1
            run_sign_change = count_sign_changes(u[max(i - 1, 0):min(j + 1, n)])
            if (j - i) >= cfg.ambiguous_run and run_sign_change == 0:
                raise AmbiguousZero(
                    f"|u| below {cfg.ambiguous_floor:g}*max over "
                    f"[{r[i]:.6g}, {r[j - 1]:.6g}] without a sign change")
        if u[i] == 0.0:
            if 0 < i:
                zeros.append(float(r[i]))
            i += 1
            continue
        if u[i] * u[i + 1] < 0.0:
            f = _hermite(r[i], u[i], v[i], r[i + 1], u[i + 1], v[i + 1])
            z = brentq(f, r[i], r[i + 1], xtol=1e-14, rtol=4e-15)
            zeros.append(float(z))
        i += 1

    boundary = bool(abs(u[-1]) <= cfg.boundary_zero_rtol * umax)
    if boundary:
        # a terminal value within noise of zero is NOT an interior crossing;
        # drop any refined zero inside the last sample interval
        cut = r[-2] if n >= 2 else r[-1]
        zeros = [z for z in zeros if z < cut]

    for z in zeros:
        dz = float(sol.derivative(z))
        if abs(dz) < cfg.simple_zero_floor * vmax:
            raise AmbiguousZero(f"zero at r={z:.8g} is not simple "
                                f"(|u'|={abs(dz):.2e})")
    if boundary and not open_upper:
        zeros = zeros + [float(r[-1])]
    sol.zeros = np.asarray(zeros)
    sol.boundary_zero = boundary
    return sol


def ode_residual(sol: RadialSolution, a_eval: Callable, dimension: int) -> float:
    """Relative flux-balance defect of the samples against the equation.

    For each sample interval the exact solution satisfies
    ``[r^(N-1) u']_i^(i+1) + int r^(N-1) a u dr = 0``; the integral is
    evaluated by Gauss quadrature on the Hermite reconstruction, so the
    defect measures how well the samples solve the equation, independently
    of how they were produced.
    """
    r, u, v = sol.r, sol.u, sol.du
    nm1 = dimension - 1
    r0, r1 = r[:-1], r[1:]
    h = r1 - r0
    t = _GL5_T[None, :]
    t2 = t * t
    t3 = t2 * t
    pts = r0[:, None] + h[:, None] * t
    uq = ((2 * t3 - 3 * t2 + 1) * u[:-1, None]
          + (h[:, None] * (t3 - 2 * t2 + t)) * v[:-1, None]
          + (-2 * t3 + 3 * t2) * u[1:, None]
          + (h[:, None] * (t3 - t2)) * v[1:, None])
    aq = np.asarray(a_eval(pts.ravel()), dtype=float).reshape(pts.shape)
    integral = h * ((pts**nm1 * aq * uq) @ _GL5_W)
    defect = r1**nm1 * v[1:] - r0**nm1 * v[:-1] + integral
    umax = float(np.max(np.abs(u)))
    amax = np.max(np.abs(aq), axis=1)
    denom = h * (0.5 * (r0 + r1))**nm1 * (1.0 + amax) * umax + 1e-300
    return float(np.max(np.abs(defect) / denom))
