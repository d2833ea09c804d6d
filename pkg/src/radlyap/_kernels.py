"""Hot integration kernels: numba-jitted with a pure-Python/numpy fallback.

The fallback is selected by setting the environment variable
``RADLYAP_DISABLE_NUMBA=1`` (or when numba is not importable).  Both paths
run the identical step arithmetic, so results agree to the last bit; the
jitted path is two to three orders of magnitude faster on the 10^4-step
grids used by default.  ``benchmarks/kernel_benchmark.py`` compares them.

Kernel convention: the radial system u' = v, v' = -(c(r) v + a(r) u) with
c(r) = (N-1)/r is advanced by classical RK4.  Grids carry the step
midpoints, so arrays of length 2n+1 describe n steps: index 2i is the i-th
step start, 2i+1 its midpoint.  ``rhalf``, ``chalf`` and ``ahalf`` are the
radii, c-values and coefficient values on that interleaved grid.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("RADLYAP_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")
USE_NUMBA = numba is not None and not _DISABLED


def _shoot_rk4_impl(rhalf, chalf, ahalf, u0, v0, out_u, out_v):
    """RK4 sweep of the linear radial equation; returns 0 or the failing step."""
    n = (rhalf.shape[0] - 1) // 2
    u = u0
    v = v0
    out_u[0] = u
    out_v[0] = v
    for i in range(n):
        j = 2 * i
        h = rhalf[j + 2] - rhalf[j]
        c0 = chalf[j]
        c1 = chalf[j + 1]
        c2 = chalf[j + 2]
        a0 = ahalf[j]
        a1 = ahalf[j + 1]
        a2 = ahalf[j + 2]
        k1u = v
        k1v = -(c0 * v + a0 * u)
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2u = v2
        k2v = -(c1 * v2 + a1 * u2)
        u3 = u + 0.5 * h * k2u
        v3 = v + 0.5 * h * k2v
        k3u = v3
        k3v = -(c1 * v3 + a1 * u3)
        u4 = u + h * k3u
        v4 = v + h * k3v
        k4u = v4
        k4v = -(c2 * v4 + a2 * u4)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.isfinite(u) and np.isfinite(v)):
            return i + 1
        out_u[i + 1] = u
        out_v[i + 1] = v
    return 0


def _shoot_power_rk4_impl(rhalf, chalf, lam, qm1, u0, v0, out_u, out_v):
    """RK4 sweep of u' = v, v' = -(c v + lam * sign(u)|u|^(q-1)).

    The odd power keeps the Euler-Lagrange equation of the q-norm quotient
    meaningful past a sign change.
    """
    n = (rhalf.shape[0] - 1) // 2
    u = u0
    v = v0
    out_u[0] = u
    out_v[0] = v
    for i in range(n):
        j = 2 * i
        h = rhalf[j + 2] - rhalf[j]
        c0 = chalf[j]
        c1 = chalf[j + 1]
        c2 = chalf[j + 2]
        k1u = v
        k1v = -(c0 * v + lam * np.sign(u) * np.abs(u) ** qm1)
        u2 = u + 0.5 * h * k1u
        v2 = v + 0.5 * h * k1v
        k2u = v2
        k2v = -(c1 * v2 + lam * np.sign(u2) * np.abs(u2) ** qm1)
        u3 = u + 0.5 * h * k2u
        v3 = v + 0.5 * h * k2v
        k3u = v3
        k3v = -(c1 * v3 + lam * np.sign(u3) * np.abs(u3) ** qm1)
        u4 = u + h * k3u
        v4 = v + h * k3v
        k4u = v4
        k4v = -(c2 * v4 + lam * np.sign(u4) * np.abs(u4) ** qm1)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.isfinite(u) and np.isfinite(v)):
            return i + 1
        out_u[i + 1] = u
        out_v[i + 1] = v
    return 0


# Pure-Python references are kept importable regardless of the backend so the
# benchmark and the backend-agreement test can call both paths directly.
shoot_rk4_py = _shoot_rk4_impl
shoot_power_rk4_py = _shoot_power_rk4_impl

if USE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    shoot_rk4 = _jit(_shoot_rk4_impl)
    shoot_power_rk4 = _jit(_shoot_power_rk4_impl)
    BACKEND = "numba"
else:
    shoot_rk4 = shoot_rk4_py
    shoot_power_rk4 = shoot_power_rk4_py
    BACKEND = "numpy"


def backend() -> str:
    """Active kernel backend, ``"numba"`` or ``"numpy"``."""
    return BACKEND
