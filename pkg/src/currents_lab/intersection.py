"""Intersection numbers from Dehn coordinates: the determinant main term,
a certified enclosure, and the cases where the value is exact.

For integer coordinates everything is exact Python integer arithmetic
(``Fraction`` where a half appears); real coordinates use floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ShapeError
from .topology import INTEGER, DehnCoords, SurfaceTopology

INNER = 11  # subtracted inside the max, per cuff
ENVELOPE = 22  # error envelope per cuff
COARSE_N = 23


@dataclass(frozen=True)
class IntervalBound:
    lower: object
    upper: object
    central: object

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    def as_tuple(self) -> tuple:
        return (self.lower, self.upper, self.central)


def _check(c: DehnCoords, c2: DehnCoords, topo: SurfaceTopology | None = None) -> None:
    if len(c) != len(c2):
        raise ShapeError(f"dimension mismatch: {len(c)} vs {len(c2)}")
    if topo is not None and len(c) != topo.num_curves:
        raise ShapeError(f"expected {topo.num_curves} coordinates, got {len(c)}")


def _dets(c: DehnCoords, c2: DehnCoords) -> list:
    return [abs(m * t2 - m2 * t) for m, t, m2, t2 in zip(c.m, c.t, c2.m, c2.t)]


def det_main_term(c: DehnCoords, c2: DehnCoords):
    """``sum_i |m_i t'_i - m'_i t_i|``."""
    _check(c, c2)
    return sum(_dets(c, c2))


def cross_mass(c: DehnCoords, c2: DehnCoords):
    """``sum_i m_i m'_i``."""
    _check(c, c2)
    return sum(a * b for a, b in zip(c.m, c2.m))


def pants_term(topo: SurfaceTopology, c: DehnCoords, c2: DehnCoords):
    """``sum_s (m_i+m_j+m_k)(m'_i+m'_j+m'_k)``; a repeated cuff counts twice."""
    _check(c, c2, topo)
    total = 0
    for tri in topo.pants_boundaries:
        total += sum(c.m[i] for i in tri) * sum(c2.m[i] for i in tri)
    return total


def bound_interval(topo: SurfaceTopology, c: DehnCoords, c2: DehnCoords) -> IntervalBound:
    _check(c, c2, topo)
    exact = c.ring == INTEGER and c2.ring == INTEGER
    dets = _dets(c, c2)
    lower = sum(max(0, d - INNER * m * m2) for d, m, m2 in zip(dets, c.m, c2.m))
    half = Fraction(pants_term(topo, c, c2), 2) if exact else pants_term(topo, c, c2) / 2
    upper = lower + ENVELOPE * cross_mass(c, c2) + half
    if exact and isinstance(upper, Fraction) and upper.denominator == 1:
        upper = int(upper)
    return IntervalBound(lower, upper, sum(dets))


def coarse_bound(c: DehnCoords, c2: DehnCoords) -> IntervalBound:
    """``central +- N sum_{i,j} m_i m'_j`` with ``N = 23``, clipped below at 0.

    The error sums over all index pairs, so curves with disjoint pants
    support still get a nonzero width.
    """
    central = det_main_term(c, c2)
    err = COARSE_N * sum(c.m) * sum(c2.m)
    return IntervalBound(max(0, central - err), central + err, central)


def exact_special(c: DehnCoords, c2: DehnCoords):
    """Exact value when one side is supported on the pants curves, else ``None``."""
    _check(c, c2)
    if not any(c2.m):
        return sum(t2 * m for t2, m in zip(c2.t, c.m))
    if not any(c.m):
        return sum(t * m2 for t, m2 in zip(c.t, c2.m))
    return None
