"""Radial coefficient functions on (0, 1] and their JSON round-trip.

A potential is an ordered list of segments partitioning (0, 1]: constant
pieces, named closed-form pieces, or sampled grids with linear
interpolation.  The JSON document layout is fixed by the CLI schema::

    {"dimension": N, "pieces": [
        {"type": "constant",    "lo": 0.0, "hi": 0.5, "value": 25.0},
        {"type": "closed_form", "lo": 0.0, "hi": 0.1, "name": "planar_bump",
         "params": {"alpha": 0.3, "scale": 0.1}},
        {"type": "sampled",     "lo": 0.5, "hi": 1.0, "grid": [...],
         "values": [...], "interpolation": "linear"}]}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import DEFAULT, SolverConfig
from .errors import ConfigError, SingularPotential

# name -> (eval(params, r) -> ndarray, inner_breakpoints(params, lo, hi) -> list,
#          sup(params, lo, hi) -> float)
_CLOSED_FORMS: dict = {}


def register_closed_form(name: str, evaluate: Callable, breakpoints: Callable,
                         sup: Callable) -> None:
    _CLOSED_FORMS[name] = (evaluate, breakpoints, sup)


@dataclass(frozen=True)
class ConstantPiece:
    lo: float
    hi: float
    value: float

    def evaluate(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.value)

    def sup(self) -> float:
        return abs(self.value)

    def inner_breakpoints(self):
        return []

    def to_json(self) -> dict:
        return {"type": "constant", "lo": self.lo, "hi": self.hi,
                "value": self.value}


@dataclass(frozen=True)
class ClosedFormPiece:
    lo: float
    hi: float
    name: str
    params: dict

    def _entry(self):
        try:
            return _CLOSED_FORMS[self.name]
        except KeyError:
            raise ConfigError(f"unknown closed form {self.name!r}") from None

    def evaluate(self, r):
        return self._entry()[0](self.params, np.asarray(r, dtype=float))

    def sup(self) -> float:
        return self._entry()[2](self.params, self.lo, self.hi)

    def inner_breakpoints(self):
        return list(self._entry()[1](self.params, self.lo, self.hi))

    def to_json(self) -> dict:
        return {"type": "closed_form", "lo": self.lo, "hi": self.hi,
                "name": self.name, "params": dict(self.params)}


@dataclass(frozen=True)
class SampledPiece:
    lo: float
    hi: float
    grid: np.ndarray
    values: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.interpolation != "linear":
            raise ConfigError("only linear interpolation is supported")
        if self.grid.size != self.values.size or self.grid.size < 2:
            raise ConfigError("sampled piece needs matching grid/values, >= 2 points")
        if np.any(np.diff(self.grid) <= 0):
            raise ConfigError("sampled grid must be strictly increasing")

    def evaluate(self, r):
        return np.interp(np.asarray(r, dtype=float), self.grid, self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def inner_breakpoints(self):
        return [float(g) for g in self.grid if self.lo < g < self.hi]

    def to_json(self) -> dict:
        return {"type": "sampled", "lo": self.lo, "hi": self.hi,
                "grid": self.grid.tolist(), "values": self.values.tolist(),
                "interpolation": self.interpolation}


@dataclass
class RadialPotential:
    """Piecewise radial coefficient a(r) on (0, 1]."""

    dimension: int
    pieces: list
    level: Optional[int] = None   # intended eigenvalue index, metadata only

    def __post_init__(self):
        if self.dimension < 2:
            raise ConfigError("dimension must be >= 2")
        if not self.pieces:
            raise ConfigError("potential needs at least one piece")
        self.pieces = sorted(self.pieces, key=lambda p: p.lo)
        if abs(self.pieces[0].lo) > 1e-15 or abs(self.pieces[-1].hi - 1.0) > 1e-12:
            raise ConfigError("pieces must cover (0, 1]")
        for a, b in zip(self.pieces[:-1], self.pieces[1:]):
            if abs(a.hi - b.lo) > 1e-12:
                raise ConfigError(f"gap or overlap at r={a.hi!r}")
            if b.hi <= b.lo:
                raise ConfigError("empty piece")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        edges = [p.hi for p in self.pieces]
        idx = np.searchsorted(edges, r, side="left")
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if np.any(m):
                out[m] = piece.evaluate(r[m])
        if not np.all(np.isfinite(out)):
            raise SingularPotential("potential evaluation overflowed")
        return out

    def __call__(self, r):
        return self.evaluate(r)

    def breakpoints(self) -> list:
        """All radii where the coefficient may kink or jump."""
        cuts = set()
        for p in self.pieces:
            cuts.add(p.lo)
            cuts.add(p.hi)
            cuts.update(p.inner_breakpoints())
        return sorted(c for c in cuts if 0.0 < c < 1.0)

    def sup(self) -> float:
        return max(p.sup() for p in self.pieces)

    def segments(self, cfg: SolverConfig = DEFAULT) -> list:
        """Integration segments split at every breakpoint."""
        cuts = [max(self.pieces[0].lo, cfg.start_radius)]
        cuts += [b for b in self.breakpoints() if b > cuts[0]]
        cuts.append(1.0)
        segs = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            piece = self._piece_at(mid)
            segs.append((lo, hi, piece.evaluate, piece.sup()))
        return segs

    def _piece_at(self, r: float):
        for p in self.pieces:
            if p.lo <= r <= p.hi:
                return p
        return self.pieces[-1]

    def lp_distance(self, shift: float, p: float, rtol: float = 1e-9) -> float:
        """Full-measure L^p distance of the coefficient to a constant."""
        from .quadrature import radial_integral
        if np.isinf(p):
            cuts = [0.0] + self.breakpoints() + [1.0]
            best = 0.0
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                grid = np.linspace(lo + 1e-12, hi - 1e-12, 2049)
                best = max(best, float(np.max(np.abs(self.evaluate(grid) - shift))))
            return best
        if p < 1:
            raise ConfigError("need p >= 1")
        val = radial_integral(
            lambda r: np.abs(self.evaluate(r) - shift) ** p, self.dimension,
            0.0, 1.0, rtol=rtol, breakpoints=self.breakpoints())
        return val ** (1.0 / p)

    # -- constructors and serialization --------------------------------------

    @classmethod
    def constant(cls, dimension: int, value: float,
                 level: Optional[int] = None) -> "RadialPotential":
        return cls(dimension, [ConstantPiece(0.0, 1.0, float(value))], level)

    @classmethod
    def piecewise_constant(cls, dimension: int, knots: Sequence[float],
                           values: Sequence[float],
                           level: Optional[int] = None) -> "RadialPotential":
        """knots are the full edge list 0 = k_0 < ... < k_m = 1."""
        knots = [float(k) for k in knots]
        if len(values) != len(knots) - 1:
            raise ConfigError("need one value per knot interval")
        pieces = [ConstantPiece(a, b, float(v))
                  for a, b, v in zip(knots[:-1], knots[1:], values)]
        return cls(dimension, pieces, level)

    def shifted(self, offset: float) -> "RadialPotential":
        """Potential offset + scale-free copy (constant/sampled pieces only)."""
        out = []
        for p in self.pieces:
            if isinstance(p, ConstantPiece):
                out.append(ConstantPiece(p.lo, p.hi, p.value + offset))
            elif isinstance(p, SampledPiece):
                out.append(SampledPiece(p.lo, p.hi, p.grid, p.values + offset))
            else:
                raise ConfigError("cannot shift a closed-form piece")
        return RadialPotential(self.dimension, out, self.level)

    def to_json_dict(self) -> dict:
        doc = {"dimension": self.dimension,
               "pieces": [p.to_json() for p in self.pieces]}
        if self.level is not None:
            doc["level"] = self.level
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RadialPotential":
        try:
            dim = int(doc["dimension"])
            pieces = []
            for pd in doc["pieces"]:
                kind = pd["type"]
                if kind == "constant":
                    pieces.append(ConstantPiece(float(pd["lo"]), float(pd["hi"]),
                                                float(pd["value"])))
                elif kind == "closed_form":
                    pieces.append(ClosedFormPiece(float(pd["lo"]), float(pd["hi"]),
                                                  str(pd["name"]),
                                                  dict(pd["params"])))
                elif kind == "sampled":
                    pieces.append(SampledPiece(float(pd["lo"]), float(pd["hi"]),
                                               pd["grid"], pd["values"],
                                               pd.get("interpolation", "linear")))
                else:
                    raise ConfigError(f"unknown piece type {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed potential document: {exc}") from exc
        return cls(dim, pieces, doc.get("level"))
