"""Weighted radial quadrature and the unit-sphere measure.

All integrals over the ball reduce to one-dimensional integrals against the
weight ``omega_N r^(N-1) dr``; the composite Gauss-Legendre scheme below
doubles panel counts until the Richardson difference of consecutive levels
meets the requested relative error.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SolverError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def sphere_measure(dimension: int) -> float:
    """Measure of the unit (N-1)-sphere from the two-step recursion.

    omega_2 = 2*pi (circle), omega_3 = 4*pi, omega_N = 2*pi*omega_{N-2}/(N-2).
    """
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    if dimension == 2:
        return 2.0 * math.pi
    if dimension == 3:
        return 4.0 * math.pi
    return 2.0 * math.pi * sphere_measure(dimension - 2) / (dimension - 2)


def ball_volume(dimension: int, radius: float = 1.0) -> float:
    return sphere_measure(dimension) * radius**dimension / dimension


def _panels(f, lo: float, hi: float, n: int) -> float:
    edges = np.linspace(lo, hi, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    # nodes shaped (panels, gl-order), flattened for one vectorized call
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def integrate(f, lo: float, hi: float, rtol: float = 1e-9,
              breakpoints=(), max_doublings: int = 16) -> float:
    """Adaptive composite Gauss-Legendre integral of a vectorized callable.

    ``breakpoints`` lists interior radii where the integrand may kink or
    jump; each resulting cell is refined independently.
    """
    if hi <= lo:
        return 0.0
    cuts = [lo] + sorted(b for b in breakpoints if lo < b < hi) + [hi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = 2
        prev = _panels(f, a, b, n)
        for _ in range(max_doublings):
            n *= 2
            cur = _panels(f, a, b, n)
            if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) + 1e-300:
                prev = cur
                break
            prev = cur
        else:
            raise SolverError(
                f"quadrature failed to reach rtol={rtol} on ({a}, {b})")
        total += prev
    return total


def radial_integral(f, dimension: int, lo: float, hi: float,
                    rtol: float = 1e-9, breakpoints=()) -> float:
    """Integral of a radial function over the annulus/ball shell (lo, hi)."""
    w = sphere_measure(dimension)
    nm1 = dimension - 1
    return w * integrate(lambda r: r**nm1 * f(r), lo, hi,
                         rtol=rtol, breakpoints=breakpoints)
