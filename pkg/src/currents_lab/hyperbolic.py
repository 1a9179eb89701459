"""Fenchel-Nielsen geometry: collars, winding counts, holonomy, lengths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .curves import StandardCurve, assemble
from .errors import ConstructionError, DomainError, NonHyperbolicError, ShapeError
from .holonomy import FNCoords, I2, Surface
from .topology import DehnCoords, SurfaceTopology, canonicalize, lattice_covolume
from .words import CurveWord, Marking, cyclic_rotations, invert, marking, to_word

# additive uncertainty of the collar-crossing estimate 2r + |w| L (two right
# triangles, each within log 2 of the sum of its legs)
K_ARC = 2 * math.log(2)
# bracket for exact_length / length_estimate measured at tau = 0, max l <= 0.1
K_LEN = 2.0
RELATOR_TOL = 1e-9
SYSTOLE_EPS = 0.1
AUTO_DPS_BELOW = 0.05  # use mpmath when some length is this short
DEFAULT_DPS = 30
SHORTLIST = 256  # words per length re-evaluated in extended precision


def Log(x: float) -> float:
    """``max(1, log x)``."""
    return max(1.0, math.log(x))


# collars and windings ------------------------------------------------------


@dataclass(frozen=True)
class CollarData:
    core_length: float
    width: float
    boundary_length: float = 1.0


def collar(L: float) -> CollarData:
    """Standard collar about a geodesic of length ``L <= 1``: ``cosh r = 1/L``."""
    if not 0 < L <= 1:
        raise DomainError(f"collar needs 0 < L <= 1, got {L}")
    return CollarData(L, math.acosh(1.0 / L), 1.0)


def annulus_crossings(a: float, b: float, a2: float, b2: float) -> int:
    """Number of deck translates ``n`` with ``((a - a2) + n)((b - b2) + n) < 0``.

    Endpoints are offsets along the core in units of its length; the count
    is the number of integers strictly between ``-(a - a2)`` and ``-(b - b2)``.
    """
    x, y = a - a2, b - b2
    lo, hi = sorted((-x, -y))
    if lo == hi:
        return 0
    return max(0, math.ceil(hi) - math.floor(lo) - 1)


def arc_length_estimate(r: float, w: float, L: float) -> float:
    """Main term ``2r + |w| L``; uncertainty ``K_ARC``."""
    if r <= 0 or L <= 0:
        raise DomainError("r and L must be positive")
    return 2 * r + abs(w) * L


def arc_length_right_triangles(r: float, w: float, L: float) -> float:
    """Length of the geodesic arc through two right triangles with legs ``r``
    and ``|w| L / 2`` (``cosh c = cosh a cosh b``)."""
    return 2 * math.acosh(math.cosh(r) * math.cosh(abs(w) * L / 2))


# holonomy -------------------------------------------------------------------


@dataclass(frozen=True)
class HolonomyRep:
    topo: SurfaceTopology
    fn: FNCoords
    generators: tuple  # 2g matrices (numpy, float or mpmath entries)
    relator: tuple
    marking: Marking = field(repr=False)
    surface: Surface = field(repr=False, compare=False)
    dps: int | None = None

    def evaluate(self, word: CurveWord | Sequence) -> "_Scaled":
        if isinstance(word, CurveWord):
            word = word.letters
        return _product((self.generators[g] if e > 0 else _inv(self.generators[g])) for g, e in word)

    def relator_residual(self) -> float:
        with _precision(self.dps):
            m = self.evaluate(self.relator).matrix()
            return min(_frob(m - I2), _frob(m + I2))

    def curve_trace(self, word: Sequence) -> float:
        hi = self.extended()
        with _precision(hi.dps):
            return float(hi.evaluate(word).trace())

    def extended(self) -> "HolonomyRep":
        """This representation in ``mpmath`` (itself when already extended).

        Double-precision products of generator matrices lose up to ~1e-7
        relative accuracy on words of a few dozen letters, so word lengths
        are always evaluated here.
        """
        if self.dps:
            return self
        cached = self.__dict__.get("_extended")
        if cached is None:
            cached = fn_to_holonomy(self.topo, self.fn, dps=DEFAULT_DPS)
            object.__setattr__(self, "_extended", cached)
        return cached


def _inv(g: np.ndarray) -> np.ndarray:
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])


def _frob(m: np.ndarray) -> float:
    return math.sqrt(sum(float(x) ** 2 for x in m.flat))


class _precision:
    def __init__(self, dps):
        self.ctx = mpmath.workdps(dps) if dps else None

    def __enter__(self):
        if self.ctx:
            self.ctx.__enter__()

    def __exit__(self, *exc):
        if self.ctx:
            self.ctx.__exit__(*exc)


class _Scaled:
    """A matrix product stored as ``matrix * exp(log_scale)``."""

    def __init__(self, m: np.ndarray, log_scale: float = 0.0):
        self.m = m
        self.log_scale = log_scale

    def matrix(self) -> np.ndarray:
        if self.log_scale:
            return self.m * math.exp(self.log_scale)
        return self.m

    def trace(self):
        return (self.m[0, 0] + self.m[1, 1]) * math.exp(self.log_scale)

    def translation_length(self) -> float:
        tr = abs(self.m[0, 0] + self.m[1, 1])
        if self.log_scale == 0 and tr < 1e8:
            if tr <= 2:
                raise NonHyperbolicError(f"|trace| {float(tr)} <= 2")
            lb = mpmath if isinstance(tr, mpmath.mpf) else math
            return float(2 * lb.acosh(tr / 2))
        if tr <= 0:
            raise NonHyperbolicError("vanishing trace")
        lb = mpmath if isinstance(tr, mpmath.mpf) else math
        # acosh(y) = log(2y) - O(y^-2) for the huge traces that reach this branch
        return float(2 * (lb.log(tr) + self.log_scale))


def _product(mats) -> _Scaled:
    m = I2
    log_scale = 0.0
    for k, g in enumerate(mats):
        m = m @ g
        if k % 8 == 7:
            big = max(abs(x) for x in m.flat)
            if big > 1e50:
                m = m / big
                log_scale += float(mpmath.log(big) if isinstance(big, mpmath.mpf) else math.log(big))
    return _Scaled(m, log_scale)


def fn_to_holonomy(topo: SurfaceTopology, x: FNCoords, dps: int | None | str = "auto") -> HolonomyRep:
    """Generator matrices of the surface group for FN coordinates ``x``.

    ``dps=None`` works in doubles, an integer in ``mpmath`` with that many
    digits.  ``"auto"`` tries doubles (unless a length is below 0.05, where
    traces near 2 are unresolvable), then 30, 60, ... digits until the
    relator check passes: with short curves the generators are large and
    evaluating the relator cancels many digits.
    """
    if len(x.lengths) != topo.num_curves:
        raise ShapeError(f"expected {topo.num_curves} FN pairs, got {len(x.lengths)}")
    if dps != "auto":
        rep = _build(topo, x, dps)
        res = rep.relator_residual()
        if res > RELATOR_TOL:
            raise ConstructionError(f"relator residual {res:.3g}")
        return rep
    ladder = ([None] if min(x.lengths) >= AUTO_DPS_BELOW else []) + [DEFAULT_DPS * 2**k for k in range(4)]
    res = math.inf
    for d in ladder:
        rep = _build(topo, x, d)
        res = rep.relator_residual()
        if res <= RELATOR_TOL:
            return rep
    raise ConstructionError(f"relator residual {res:.3g} at {ladder[-1]} digits")


def _build(topo: SurfaceTopology, x: FNCoords, dps) -> HolonomyRep:
    mk = marking(topo)
    with _precision(dps):
        surface = Surface(topo, x, dps=dps)
        P = {t: surface.path_matrix(p) for t, p in mk.tree_paths.items()}
        gens = []
        for letter in mk.generators:
            u, v = Surface.letter_tiles(topo, letter)
            gens.append(P[u] @ surface.letter_matrix(letter) @ _inv(P[v]))
    return HolonomyRep(topo, x, tuple(gens), mk.relator, mk, surface, dps)


def exact_length(rep: HolonomyRep, w: CurveWord | Sequence) -> float:
    """Translation length ``2 arccosh(|tr|/2)`` of the word."""
    hi = rep.extended()
    with _precision(hi.dps):
        return hi.evaluate(w).translation_length()


def path_length(rep: HolonomyRep, path: Sequence) -> float:
    """Translation length of a closed tile-groupoid path (conjugate to its word)."""
    s = rep.surface
    with _precision(rep.dps):
        return _product(s.step_matrix(st) for st in path).translation_length()


def multicurve_length(rep: HolonomyRep, c: DehnCoords | StandardCurve) -> float:
    """``sum multiplicity * component length``.

    Components are evaluated along their tile paths, which are conjugate to
    their words but avoid the large tree-conjugated generator matrices.
    """
    sc = c if isinstance(c, StandardCurve) else assemble(rep.topo, canonicalize(c))
    total = 0.0
    for comp in sc.components:
        if comp.is_pants_curve:
            i = comp.coords.t.index(max(comp.coords.t))
            total += comp.multiplicity * rep.fn.lengths[i]
        else:
            total += comp.multiplicity * path_length(rep, comp.path)
    return total


def length_estimate(x: FNCoords, c: DehnCoords) -> float:
    """``sum 2 m_i Log(1/l_i) + |t_i| l_i``."""
    if len(c) != len(x.lengths):
        raise ShapeError("coordinate and FN dimensions differ")
    c = canonicalize(c)
    return float(
        sum(2 * m * Log(1 / l) + abs(t) * l for m, t, l in zip(c.m, c.t, x.lengths))
    )


def length_estimate_arrays(lengths: Sequence[float], m: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorized ``length_estimate`` over rows of ``m`` and ``t``."""
    ell = np.asarray(lengths, dtype=float)
    logs = np.array([Log(1 / l) for l in ell])
    return (2 * np.abs(m) * logs).sum(axis=-1) + (np.abs(t) * ell).sum(axis=-1)


@dataclass(frozen=True)
class Box:
    m_bounds: tuple  # per curve (0, 1/Log(1/l))
    t_bounds: tuple  # per curve (-1/l, 1/l)

    def volume(self) -> float:
        v = 1.0
        for (a, b), (c, d) in zip(self.m_bounds, self.t_bounds):
            v *= (b - a) * (d - c)
        return v

    def contains(self, c: DehnCoords) -> bool:
        return all(a <= m <= b for m, (a, b) in zip(c.m, self.m_bounds)) and all(
            a <= t <= b for t, (a, b) in zip(c.t, self.t_bounds)
        )


def cube_cx(x: FNCoords) -> Box:
    return Box(
        tuple((0.0, 1 / Log(1 / l)) for l in x.lengths),
        tuple((-1 / l, 1 / l) for l in x.lengths),
    )


def vol_bx_estimate(topo: SurfaceTopology, x: FNCoords) -> float:
    """``prod (l_i Log(1/l_i))^-1 / V_g``; correct only up to a bounded factor."""
    v = 1.0
    for l in x.lengths:
        v /= l * Log(1 / l)
    return v / float(lattice_covolume(topo))


@dataclass(frozen=True)
class SystoleEstimate:
    value: float
    valid: bool


def systole_estimate(x: FNCoords, eps: float = SYSTOLE_EPS) -> SystoleEstimate:
    """``min l_i``; valid when every pants curve is shorter than ``eps``."""
    return SystoleEstimate(min(x.lengths), max(x.lengths) <= eps)


def shortest_word_length(rep: HolonomyRep, max_len: int) -> tuple[float, tuple]:
    """Shortest translation length among nontrivial cyclically reduced words of
    at most ``max_len <= 4g`` letters.

    Up to that length the only trivial cyclically reduced words are the
    rotations of the relator and its inverse (Dehn's algorithm), which are
    excluded; longer enumerations would need a word-problem solver.
    """
    gens = [np.array(g, dtype=float) for g in rep.generators]
    if max_len > len(rep.relator):
        raise DomainError(f"max_len is limited to {len(rep.relator)}")
    letters = [(k, 1) for k in range(len(gens))] + [(k, -1) for k in range(len(gens))]
    index = {l: j for j, l in enumerate(letters)}
    hi = rep.extended()
    nl0 = len(letters)
    trivial = {
        sum(index[l] * nl0**k for k, l in enumerate(w))
        for r in (rep.relator, tuple(invert(rep.relator)))
        for w in cyclic_rotations(r)
    }
    mats = np.array([gens[k] if e > 0 else _inv(gens[k]) for k, e in letters])
    nl = len(letters)
    inverse_of = np.array([(j + len(gens)) % nl for j in range(nl)])
    best = (math.inf, ())
    cur = mats.copy()
    last = np.arange(nl)
    first = np.arange(nl)
    words = np.arange(nl)[:, None]
    for length in range(1, max_len + 1):
        if length > 1:
            ext_m, ext_l, ext_f, ext_w = [], [], [], []
            for j in range(nl):
                keep = last != inverse_of[j]
                ext_m.append(cur[keep] @ mats[j])
                ext_l.append(np.full(int(keep.sum()), j))
                ext_f.append(first[keep])
                ext_w.append(np.hstack([words[keep], np.full((int(keep.sum()), 1), j)]))
            cur, last, first, words = (
                np.concatenate(ext_m),
                np.concatenate(ext_l),
                np.concatenate(ext_f),
                np.concatenate(ext_w),
            )
        ok = last != inverse_of[first]  # cyclically reduced
        if length == len(rep.relator):
            codes = (words * nl ** np.arange(length)).sum(axis=1)
            ok &= ~np.isin(codes, np.array(sorted(trivial)))
        tr = np.where(ok, np.abs(cur[:, 0, 0] + cur[:, 1, 1]), np.inf)
        # float traces near 2 lose ~1/l of relative accuracy in length:
        # shortlist in float, decide in extended precision
        take = np.argsort(tr, kind="stable")[:SHORTLIST]
        for k in take:
            if not np.isfinite(tr[k]):
                break
            w = tuple(letters[j] for j in words[k])
            with _precision(hi.dps):
                t = abs(hi.evaluate(w).trace())
            if t > 2:
                val = float(2 * mpmath.acosh(t / 2))
                if val < best[0]:
                    best = (val, w)
    return best
