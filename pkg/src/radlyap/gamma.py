"""Numerical upper bounds for the L^p Lyapunov constants.

The sup-norm case is exact: the constant equals the gap to the next radial
eigenvalue and is attained by that constant potential.  For finite p the
estimator searches nonnegative piecewise-constant shapes on a dyadic knot
grid; each shape's admissible amplitude is resolved by a one-parameter
root-find on the terminal Neumann slope, and a seeded simplex search with
restarts minimizes the weighted norm of the resulting potential.  In the
regimes where the explicit families apply, their sweep is evaluated too and
the smaller value wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from . import _kernels
from .config import DEFAULT, SolverConfig
from .errors import ConfigError, NoRootInRange, SolverError
from .families import (PlanarFamilyParams, SubcriticalFamilyParams,
                       build_planar_family, build_subcritical_family,
                       linf_constant, linf_witness, planar_l1_norm)
from .potentials import ConstantPiece, RadialPotential, SampledPiece
from .quadrature import sphere_measure
from .shooting import count_sign_changes, segment_grid, taylor_start
from .spectra import neumann_pair
from .zeros import is_member_gamma_k, shoot_radial


@dataclass(frozen=True)
class GammaQuery:
    dimension: int
    index: int
    p: float                       # may be math.inf
    knots: int = 8
    budget: int = 800
    seed: int = 0
    restarts: int = 8
    knot_edges: Optional[tuple] = None   # custom edges 0 = e_0 < ... < e_m = 1

    def __post_init__(self):
        if self.dimension < 2 or self.index < 0:
            raise ConfigError("need N >= 2, k >= 0")
        if not (self.p >= 1):
            raise ConfigError("need p in [1, inf]")
        if self.knots < 1 or self.knots > 18 or self.budget < 1 \
                or self.restarts < 1:
            raise ConfigError("need 1 <= knots <= 18, budget/restarts >= 1")


@dataclass
class GammaEstimate:
    value: float
    kind: str                      # "exact" | "upper_bound" | "family_limit"
    witness: RadialPotential
    diagnostics: dict = field(default_factory=dict)


def _shape_sup(shape: RadialPotential) -> float:
    s = shape.sup()
    if s <= 0:
        raise ConfigError("shape must not be identically zero")
    return s


def _check_nonneg(shape: RadialPotential) -> None:
    cuts = [0.0] + shape.breakpoints() + [1.0]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        grid = np.linspace(lo + 1e-12, hi - 1e-12, 257)
        if float(np.min(shape.evaluate(grid))) < -1e-12:
            raise ConfigError("shape must be nonnegative")


class _AmplitudeShooter:
    """Shoots a = mu_k + t * shape for many t, reusing grids and shape values."""

    def __init__(self, dimension: int, mu: float, shape: RadialPotential,
                 cfg: SolverConfig):
        self.N = dimension
        self.mu = mu
        self.cfg = cfg
        self.segs = []
        for lo, hi, a_eval, sup_a in shape.segments(cfg):
            self.segs.append((lo, hi, a_eval, sup_a, {}))

    def _arrays(self, seg, sup_total):
        lo, hi, a_eval, _, cache = seg
        key = segment_grid(lo, hi, sup_total, self.N, self.cfg)[0].shape[0]
        hit = cache.get(key)
        if hit is None:
            rhalf, chalf = segment_grid(lo, hi, sup_total, self.N, self.cfg)
            r_eval = rhalf.copy()
            w = rhalf[-1] - rhalf[0]
            r_eval[0] += 1e-12 * w
            r_eval[-1] -= 1e-12 * w
            svals = np.asarray(a_eval(r_eval), dtype=float)
            cache[key] = (rhalf, chalf, svals)
            hit = cache[key]
        return hit

    def shoot(self, t: float):
        """Returns (terminal slope, max |u'|, zero-crossing count)."""
        first = True
        u = v = 0.0
        count = 0
        vmax = 0.0
        prev_sign = 0.0
        for seg in self.segs:
            lo, hi, _, sup_s, _ = seg
            sup_total = abs(self.mu) + t * sup_s
            rhalf, chalf, svals = self._arrays(seg, sup_total)
            ahalf = self.mu + t * svals
            n = (rhalf.size - 1) // 2
            out_u = np.empty(n + 1)
            out_v = np.empty(n + 1)
            if first:
                u, v = taylor_start(self.N, float(ahalf[0]), float(rhalf[0]))
                first = False
            bad = _kernels.shoot_rk4(rhalf, chalf, ahalf, u, v, out_u, out_v)
            if bad:
                raise SolverError("amplitude shot diverged")
            u, v = float(out_u[-1]), float(out_v[-1])
            vmax = max(vmax, float(np.max(np.abs(out_v))))
            s = np.sign(out_u)
            nz = s[s != 0.0]
            if nz.size:
                if prev_sign != 0.0:
                    count += int(prev_sign * nz[0] < 0)
                count += int(np.count_nonzero(nz[1:] * nz[:-1] < 0))
                prev_sign = nz[-1]
        return v, vmax, count


def _shape_witness(shape: RadialPotential, mu: float, t: float,
                   level: int) -> RadialPotential:
    """Potential mu + t * shape as a serializable piece list."""
    pieces = []
    for pc in shape.pieces:
        if isinstance(pc, ConstantPiece):
            pieces.append(ConstantPiece(pc.lo, pc.hi, mu + t * pc.value))
        elif isinstance(pc, SampledPiece):
            pieces.append(SampledPiece(pc.lo, pc.hi, pc.grid,
                                       mu + t * pc.values))
        else:
            inner = pc.inner_breakpoints()
            grid = np.unique(np.concatenate(
                [np.linspace(pc.lo, pc.hi, 2049), np.asarray(inner)]))
            pieces.append(SampledPiece(pc.lo, pc.hi, grid,
                                       mu + t * pc.evaluate(grid)))
    return RadialPotential(shape.dimension, pieces, level)


def amplitude_solve(dimension: int, index: int, shape: RadialPotential,
                    cfg: SolverConfig = DEFAULT, t_max: Optional[float] = None,
                    scan_points: Optional[int] = None,
                    details: bool = False):
    """Smallest t > 0 making mu_k + t * shape admissible at level ``index``.

    Scans t upward watching the terminal Neumann slope, bisects each sign
    change, and returns the smallest root whose witness solution carries at
    least index + 1 zeros.
    """
    _check_nonneg(shape)
    sup_s = _shape_sup(shape)
    mu = neumann_pair(dimension, index, cfg).eigenvalue
    gap = neumann_pair(dimension, index + 1, cfg).eigenvalue - mu
    if t_max is None:
        hi_idx = min(index + 3, cfg.max_eigen_index)
        t_max = (neumann_pair(dimension, hi_idx, cfg).eigenvalue - mu) / sup_s
    dt = gap / (16.0 * sup_s)
    if scan_points is not None:
        dt = t_max / scan_points

    shooter = _AmplitudeShooter(dimension, mu, shape, cfg)

    def slope(t):
        return shooter.shoot(t)[0]

    roots = []
    t_prev = dt * 1e-3
    f_prev = slope(t_prev)
    t = t_prev
    while t < t_max:
        t = min(t + dt, t_max)
        f = slope(t)
        if f == 0.0 or np.sign(f) != np.sign(f_prev):
            root = t if f == 0.0 else brentq(slope, t_prev, t,
                                             xtol=1e-12, rtol=1e-13)
            _, _, count = shooter.shoot(root)
            roots.append((float(root), int(count)))
            if count >= index + 1:
                if details:
                    return float(root), {"roots": roots, "t_max": t_max,
                                         "zero_count": count}
                return float(root)
        t_prev, f_prev = t, f
    raise NoRootInRange(
        f"no admissible amplitude below t_max={t_max:.6g} "
        f"(roots found: {roots})")


def piecewise_norm(edges: Sequence[float], values: Sequence[float],
                   dimension: int, p: float) -> float:
    """Weighted L^p norm of a piecewise-constant radial function."""
    omega = sphere_measure(dimension)
    edges = np.asarray(edges, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    shells = (edges[1:] ** dimension - edges[:-1] ** dimension) / dimension
    if math.isinf(p):
        return float(np.max(values))
    return float((omega * np.sum(values**p * shells)) ** (1.0 / p))


def _dyadic_edges(m: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, m + 1)


def _family_sweep_min(query: GammaQuery, cfg: SolverConfig):
    """Best explicit-family value where a family applies, else None."""
    N, k, p = query.dimension, query.index, query.p
    if k < 1 or math.isinf(p):
        return None
    rows = []
    if N >= 3 and p < N / 2:
        r_k = float(neumann_pair(N, k, cfg).zeros[0])
        eps = r_k / 2.0
        for _ in range(8):
            params = SubcriticalFamilyParams(N, k, eps)
            glued = build_subcritical_family(params, cfg)
            val = glued.potential.lp_distance(glued.info["mu_k"], p,
                                              cfg.quad_rtol)
            rows.append((val, glued.potential, {"epsilon": eps}))
            eps *= 0.5
            if eps < 2.0 * cfg.min_annulus_width:
                break
    elif N == 2 and p == 1.0:
        for alpha in (0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002):
            params = PlanarFamilyParams(alpha, k)
            glued = build_planar_family(params, cfg)
            val = glued.potential.lp_distance(glued.info["mu_k"], 1.0,
                                              cfg.quad_rtol)
            rows.append((val, glued.potential,
                         {"alpha": alpha, "epsilon": glued.info["epsilon"]}))
    if not rows:
        return None
    return min(rows, key=lambda r: r[0])


def upper_bound_gamma(query: GammaQuery, cfg: SolverConfig = DEFAULT,
                      warm_values: Optional[np.ndarray] = None) -> GammaEstimate:
    """Best found upper bound for the level-k L^p Lyapunov constant.

    Exact for p = inf.  Otherwise a Nelder-Mead search over nonnegative
    piecewise-constant shapes (amplitudes resolved by ``amplitude_solve``)
    runs with seeded restarts; in subcritical regimes the explicit family
    sweep competes and may supply the returned value.
    """
    N, k, p = query.dimension, query.index, query.p
    mu = neumann_pair(N, k, cfg).eigenvalue

    if math.isinf(p):
        witness = linf_witness(N, k, cfg)
        value = linf_constant(N, k, cfg)
        member = is_member_gamma_k(N, k, witness, cfg=cfg)
        return GammaEstimate(value, "exact", witness, {
            "witness_member": bool(member),
            "witness_zero_count": member.zero_count,
        })

    m = query.knots
    edges = _dyadic_edges(m)
    omega = sphere_measure(N)
    shells = (edges[1:] ** N - edges[:-1] ** N) / N

    evals = 0
    trace = []
    best = {"value": math.inf, "shape": None, "t": None}

    def objective(x):
        nonlocal evals
        evals += 1
        s = np.abs(np.asarray(x, dtype=float))
        smax = float(np.max(s))
        if smax < 1e-12:
            return 1e9
        s = s / smax
        shape = RadialPotential.piecewise_constant(N, edges, s, level=k)
        try:
            t = amplitude_solve(N, k, shape, cfg)
        except (NoRootInRange, SolverError):
            return 1e9
        val = t * float((omega * np.sum(s**p * shells)) ** (1.0 / p))
        if val < best["value"] or (val == best["value"]
                                   and best["shape"] is not None
                                   and tuple(s) < tuple(best["shape"])):
            best.update(value=val, shape=s.copy(), t=t)
            trace.append((evals, val))
        return val

    rng = np.random.default_rng(query.seed)
    starts = [np.ones(m)]
    if warm_values is not None:
        w = np.asarray(warm_values, dtype=float)
        reps = max(1, m // max(w.size, 1))
        starts.append(np.repeat(w, reps)[:m])
    while len(starts) < query.restarts:
        starts.append(rng.uniform(0.2, 1.0, m))

    per_restart = max(8, query.budget // query.restarts)
    budget_exhausted = False
    for x0 in starts:
        if evals >= query.budget:
            budget_exhausted = True
            break
        minimize(objective, x0, method="Nelder-Mead",
                 options={"maxfev": min(per_restart, query.budget - evals),
                          "xatol": 1e-5, "fatol": 1e-10,
                          "adaptive": m >= 8})

    if best["shape"] is None:
        raise NoRootInRange("optimizer found no admissible shape")

    witness = _shape_witness(
        RadialPotential.piecewise_constant(N, edges, best["shape"], level=k),
        mu, best["t"], k)
    value = float(best["value"])
    kind = "upper_bound"

    fam = _family_sweep_min(query, cfg)
    diagnostics = {
        "evaluations": evals,
        "budget_exhausted": budget_exhausted,
        "trace": trace,
        "amplitude": best["t"],
        "optimizer_value": value,
    }
    if fam is not None:
        diagnostics["family_value"] = fam[0]
        diagnostics["family_params"] = fam[2]
        if fam[0] < value:
            value, witness, kind = fam[0], fam[1], "family_limit"

    member = is_member_gamma_k(N, k, witness, cfg=cfg)
    diagnostics["witness_member"] = bool(member)
    diagnostics["witness_zero_count"] = member.zero_count
    diagnostics["witness_norm"] = witness.lp_distance(mu, p, cfg.quad_rtol)
    return GammaEstimate(value, kind, witness, diagnostics)


def trichotomy_report(dimension: int, index: int, p_grid: Sequence[float],
                      knots: int = 8, budget: int = 400, seed: int = 0,
                      cfg: SolverConfig = DEFAULT) -> list:
    """Upper bounds and family limits across a p-grid, with a verdict column.

    The verdict is numerical evidence, not proof: a row is classified as
    vanishing when the best value drops below one percent of the gap to the
    next eigenvalue.
    """
    mu = neumann_pair(dimension, index, cfg).eigenvalue
    gap = neumann_pair(dimension, index + 1, cfg).eigenvalue - mu
    floor = 0.01 * gap
    rows = []
    for p in p_grid:
        query = GammaQuery(dimension, index, float(p), knots=knots,
                           budget=budget, seed=seed)
        est = upper_bound_gamma(query, cfg)
        fam = est.diagnostics.get("family_value")
        bound = min(est.value, fam) if fam is not None else est.value
        rows.append({
            "p": p,
            "upper_bound": est.value,
            "family_limit": fam,
            "kind": est.kind,
            "classification": ("vanishing-evidence" if bound < floor
                               else "positive-evidence"),
        })
    return rows
