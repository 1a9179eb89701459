"""Exact intersection numbers of integer multicurves by tracing geodesics.

Each component of ``D(m, t)`` is realized as a closed geodesic on a
hyperbolic structure.  Its crossings with the pants curves are located from
the axes of the component's holonomy, and the geodesic is traced through
the hexagon tiling from one crossing to the next, producing one straight
chord per visited tile (Klein model of that tile).  Transverse intersection
points of two multicurves are then counted tile by tile as crossings of
chords.  Nothing here uses the Dehn-coordinate intersection formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .curves import Component, StandardCurve, assemble
from .errors import ConstructionError, NonHyperbolicError
from .holonomy import FNCoords, I2, Surface, cross3, fixed_points, inv, klein, lib, lorentz, mink
from .topology import DehnCoords, SurfaceTopology, canonicalize

DPS = 40
# Distinct geodesics of small multicurves can fellow-travel to within 1e-15,
# so tracing runs in DPS-digit arithmetic.  Boundary positions closer than
# SHARE_TOL are one point (exact coincidences, e.g. at Weierstrass points,
# agree to ~1e-30); positions within AMBIGUOUS but not SHARE_TOL are refused.
SHARE_TOL = 1e-28
AMBIGUOUS = 1e-22
VERTEX_TOL = 1e-9
MATCH_TOL = 1e-12
SCALE = 2**120  # boundary positions are compared as integers in units of 1/SCALE


class Degenerate(Exception):
    """A traced point fell inside the guard band of a tile edge or vertex."""


def default_oracle_fn(n: int) -> FNCoords:
    """Generic thick structure: no geodesic of a small multicurve runs along a tile edge."""
    lengths = [1.0 + 0.0613 * i for i in range(n)]
    twists = [0.1309 * (1 + i) * ((-1) ** i) for i in range(n)]
    return FNCoords(lengths, twists)


@dataclass
class Crossing:
    cuff: int
    tile: int
    side: int
    point: np.ndarray  # hyperboloid point in tile coordinates
    forward: np.ndarray  # attracting ideal endpoint in tile coordinates
    backward: np.ndarray


@dataclass
class Trace:
    chords: dict  # tile -> list of (k0, k1) Klein segments
    crossings: list
    steps: int


def _normalize_point(x: np.ndarray) -> np.ndarray:
    q = -mink(x, x)
    if q <= 0:
        raise ConstructionError("lines do not meet inside the hyperbolic plane")
    x = x / lib(q).sqrt(q)
    return x if x[0] > 0 else -x


def _null(x: np.ndarray) -> np.ndarray:
    return x / x[0]


def _meet(e1, e2, v1, v2) -> np.ndarray:
    """Intersection point of the geodesic (e1, e2) with the geodesic through v1, v2."""
    return _normalize_point(cross3(cross3(e1, e2), cross3(v1, v2)))


def _edge_position(surface: Surface, s: int, side: int, x: np.ndarray):
    frame = surface.side_frame(s, side)
    y = lorentz(inv(frame)) @ x
    m = lib(y)
    return m.asinh(y[1] / m.sqrt(max(1e-300, -mink(y, y))))


def _tile_sequence(topo: SurfaceTopology, start_tile: int, path: Sequence) -> list[int]:
    tiles = [start_tile]
    cur = start_tile
    for letter, sign in path:
        a, b = Surface.letter_tiles(topo, letter)
        src, dst = (a, b) if sign > 0 else (b, a)
        if src != cur:
            raise ConstructionError("path is not a walk in the tile graph")
        cur = dst
        tiles.append(cur)
    return tiles


def locate_crossings(surface: Surface, comp: Component) -> list[Crossing]:
    """Points where the geodesic of ``comp`` crosses the pants curves, in path order."""
    topo = surface.topo
    path = comp.path
    tiles = _tile_sequence(topo, 2 * comp.start[0], path)
    mats = [surface.step_matrix(st) for st in path]
    imats = [surface.step_matrix((letter, -sign)) for letter, sign in path]
    n = len(mats)
    prefix, iprefix = [I2], [I2]
    for g, h in zip(mats, imats):
        prefix.append(prefix[-1] @ g)
        iprefix.append(h @ iprefix[-1])
    suffix, isuffix = [I2] * (n + 1), [I2] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = mats[j] @ suffix[j + 1]
        isuffix[j] = isuffix[j + 1] @ imats[j]
    out = []
    for j, (letter, sign) in enumerate(path):
        if letter[0] != "a":
            continue
        i = letter[1]
        (s, p), (t, q) = topo.cuff_slots[i]
        here, side_p = ((s, p) if sign > 0 else (t, q))
        if tiles[j] != 2 * here:
            raise ConstructionError("pants-curve crossing must leave an H tile")
        mj = suffix[j] @ prefix[j]
        tr = abs(mj[0, 0] + mj[1, 1])
        if tr <= 2.0 + 1e-12:
            raise NonHyperbolicError(f"component holonomy has |trace| {tr}")
        back, fwd = fixed_points(mj, iprefix[j] @ isuffix[j])
        tile = surface.tiles[2 * here]
        side = 2 * side_p
        v1, v2 = tile.vertices[side], tile.vertices[(side + 1) % 6]
        x = _meet(back, fwd, v1, v2)
        ell = surface.lengths[i]
        u = _edge_position(surface, here, side, x)
        k = int(lib(u).floor(u / ell))
        if k:
            tr_m = lorentz(surface.alpha_translation(here, side_p, -k))
            x, back, fwd = tr_m @ x, _null(tr_m @ back), _null(tr_m @ fwd)
            u -= k * ell
        tile_index = 2 * here
        if u >= ell / 2:
            to_mirror = lorentz(inv(surface.b_reflection(here, side_p) @ np.array([[-1.0, 0], [0, 1]])))
            x, back, fwd = to_mirror @ x, _null(to_mirror @ back), _null(to_mirror @ fwd)
            tile_index += 1
        out.append(Crossing(i, tile_index, side, x, fwd, back))
    return out


def _exit(kv: np.ndarray, p: np.ndarray, target: np.ndarray, entry: int) -> tuple[int, np.ndarray, float]:
    d = target - p
    best = None
    for k in range(6):
        if k == entry:
            continue
        a, b = kv[k], kv[(k + 1) % 6]
        e = b - a
        den = d[0] * (-e[1]) - d[1] * (-e[0])
        if abs(den) < 1e-300:
            continue
        r = a - p
        s = (r[0] * (-e[1]) - r[1] * (-e[0])) / den
        lam = (d[0] * r[1] - d[1] * r[0]) / den
        if s <= 1e-12 or lam < -1e-7 or lam > 1 + 1e-7:
            continue
        if best is None or s < best[0]:
            best = (s, k, lam)
    if best is None:
        raise ConstructionError("geodesic failed to leave a tile")
    s, k, lam = best
    if lam < VERTEX_TOL or lam > 1 - VERTEX_TOL:
        raise Degenerate("geodesic passes through a tile vertex")
    return k, p + s * d, s


def trace_component(surface: Surface, comp: Component, budget: int) -> Trace:
    """Trace one period of the geodesic of ``comp``.

    Raises :class:`Degenerate` inside the guard band and returns ``steps >
    budget`` (with partial chords) when the step budget runs out.
    """
    crossings = locate_crossings(surface, comp)
    chords: dict = {}
    steps = 0
    topo = surface.topo
    for j, cr in enumerate(crossings):
        nxt = crossings[(j + 1) % len(crossings)]
        # step across the pants curve first
        tile, side = cr.tile, cr.side
        point, fwd = cr.point, cr.forward
        while True:
            new_tile, g = surface.cross(tile, side, point)
            lg = lorentz(inv(g))
            s, _ = divmod(tile, 2)
            if side % 2 == 0:
                _, q = topo.partner(s, side // 2)
                side = 2 * q
            tile = new_tile
            point = lg @ point
            fwd = _null(lg @ fwd)
            kv = surface.tiles[tile].kvertices
            kp = klein(point)
            k_exit, kq, _ = _exit(kv, kp, fwd[1:], side)
            chords.setdefault(tile, []).append(
                (kp, kq, _perimeter(kv, kp, side), _perimeter(kv, kq, k_exit))
            )
            steps += 1
            if steps > budget:
                return Trace(chords, crossings, steps)
            w = 1 / lib(kq).sqrt(max(1e-300, 1 - kq @ kq))
            point = np.array([w, kq[0] * w, kq[1] * w])
            side = k_exit
            if side % 2 == 0:
                break
        if tile != nxt.tile or side != nxt.side:
            raise ConstructionError(
                f"traced crossing ({tile},{side}) does not match expected ({nxt.tile},{nxt.side})"
            )
        diff = klein(point) - klein(nxt.point)
        gap = math.sqrt(float(diff @ diff))
        if gap > MATCH_TOL:
            raise ConstructionError(f"traced crossing misses the expected point by {gap:.3g}")
    return Trace(chords, crossings, steps)


def _perimeter(kv: np.ndarray, point: np.ndarray, side: int) -> int:
    """Position of a boundary point, ``side + fraction along that side``, in units of ``1/SCALE``."""
    a, b = kv[side], kv[(side + 1) % 6]
    e = b - a
    frac = (point - a) @ e / (e @ e)
    return side * SCALE + int(mpmath.nint(mpmath.mpf(frac) * SCALE))


def count_chord_crossings(chords1: Sequence, chords2: Sequence, same: bool = False) -> float:
    """Crossings between two families of chords of one convex tile.

    A chord is ``(entry, exit, entry position, exit position)`` with
    positions measured along the tile boundary; two chords cross iff their
    endpoints interleave.  A shared endpoint is a crossing on the tile edge,
    seen from both adjacent tiles, so it counts one half here.  (On genus 2
    this happens at Weierstrass points, which lie on many simple geodesics
    for every hyperbolic structure.)  Two shared endpoints mean the chords
    lie on one geodesic.
    """
    if not chords1 or not chords2:
        return 0.0
    obj = dict(dtype=object)
    a = np.array([c[2] for c in chords1], **obj)[:, None]
    b = np.array([c[3] for c in chords1], **obj)[:, None]
    x = np.array([c[2] for c in chords2], **obj)[None, :]
    y = np.array([c[3] for c in chords2], **obj)[None, :]
    period = 6 * SCALE
    share, ambiguous = int(SHARE_TOL * SCALE), int(AMBIGUOUS * SCALE)

    shared = np.zeros(a.shape[:1] + x.shape[1:], dtype=int)
    for u in (a, b):
        for v in (x, y):
            d = (u - v) % period
            dist = np.minimum(d, period - d)
            if np.any((dist >= share) & (dist < ambiguous)):
                raise Degenerate("two boundary points are too close to separate")
            shared += (dist < share).astype(int)
    span = (b - a) % period
    link = (((x - a) % period) < span) ^ (((y - a) % period) < span)
    full = link.astype(bool) & (shared == 0)
    half = shared == 1
    if same:
        iu = np.triu_indices(len(chords1), 1)
        full, half = full[iu], half[iu]
    return float(np.count_nonzero(full)) + 0.5 * float(np.count_nonzero(half))


@dataclass
class OracleResult:
    value: int
    saturated: bool
    attempts: int = 1
    fn: FNCoords | None = None
    self_check: int = 0  # intersections among components of the same multicurve (must be 0)
    note: str = ""


@dataclass
class _Traced:
    comps: list  # (Component, Trace | None)
    ok: bool


def _trace_all(surface: Surface, sc: StandardCurve, radius: int) -> _Traced:
    out = []
    ok = True
    for comp in sc.components:
        if comp.is_pants_curve:
            out.append((comp, None))
            continue
        work = sum(comp.coords.m) + sum(abs(x) for x in comp.coords.t) + 1
        budget = 64 * radius * work
        tr = trace_component(surface, comp, budget)
        ok = ok and tr.steps <= budget
        out.append((comp, tr))
    return _Traced(out, ok)


def _pair_count(a, ta, b, tb, same_comp: bool) -> float:
    if ta is None and tb is None:
        return 0
    if ta is None or tb is None:
        pc, tr = (a, tb) if ta is None else (b, ta)
        i = pc.coords.t.index(1)
        return sum(1 for cr in tr.crossings if cr.cuff == i)
    total = 0.0
    for tile, segs in ta.chords.items():
        other = tb.chords.get(tile)
        if other:
            total += count_chord_crossings(segs, other, same=same_comp)
    return total


def _intersect_traced(t1: _Traced, t2: _Traced, same: bool) -> float:
    total = 0.0
    for x, (a, ta) in enumerate(t1.comps):
        for y, (b, tb) in enumerate(t2.comps):
            if same and y < x:
                continue
            k = _pair_count(a, ta, b, tb, same and x == y)
            if same and x == y:
                total += k * a.multiplicity**2
            else:
                total += k * a.multiplicity * b.multiplicity
    return total


def exact_intersection(
    topo: SurfaceTopology,
    c1: DehnCoords,
    c2: DehnCoords,
    radius: int = 6,
    fn: FNCoords | None = None,
    retries: int = 4,
    dps: int = DPS,
) -> OracleResult:
    """Geometric intersection number ``i(D(c1), D(c2))``.

    ``radius`` scales the per-component step budget (64 tile steps per unit
    of ``sum m + sum |t| + 1``); ``saturated`` is false when a trace ran out
    of budget or every perturbed structure stayed degenerate.
    """
    with mpmath.workdps(dps):
        return _exact_intersection(topo, c1, c2, radius, fn, retries, dps)


def _exact_intersection(topo, c1, c2, radius, fn, retries, dps) -> OracleResult:
    c1, c2 = canonicalize(c1), canonicalize(c2)
    sc1, sc2 = assemble(topo, c1), assemble(topo, c2)
    base = fn or default_oracle_fn(topo.num_curves)
    note = ""
    for attempt in range(retries + 1):
        f = base if attempt == 0 else _perturb(base, attempt)
        try:
            surface = Surface(topo, f, dps=dps)
            t1 = _trace_all(surface, sc1, radius)
            t2 = _trace_all(surface, sc2, radius)
            if not (t1.ok and t2.ok):
                return OracleResult(-1, False, attempt + 1, f, 0, "step budget exhausted")
            value = _as_count(_intersect_traced(t1, t2, False))
            check = _as_count(_intersect_traced(t1, t1, True) + _intersect_traced(t2, t2, True))
            return OracleResult(value, True, attempt + 1, f, check, note)
        except (Degenerate, ConstructionError) as exc:
            note = f"{type(exc).__name__}: {exc}"
    return OracleResult(-1, False, retries + 1, None, 0, note)


def _as_count(x: float) -> int:
    k = round(x)
    if abs(x - k) > 1e-9:
        raise Degenerate("unpaired half crossing on a tile edge")
    return int(k)


def _perturb(fn: FNCoords, attempt: int) -> FNCoords:
    rng = np.random.default_rng(attempt)
    lengths = [x * (1 + 0.05 * rng.uniform(-1, 1)) for x in fn.lengths]
    twists = [x + 0.05 * rng.uniform(-1, 1) for x in fn.twists]
    return FNCoords(lengths, twists)


# windings -------------------------------------------------------------------

WINDING_SLACK = 5


@dataclass
class WindingReport:
    cuff: int
    expected: float  # t_i / m_i
    windings: list  # one per strand crossing the cuff (per component, without multiplicity)
    angles: list  # crossing angles in radians

    @property
    def max_deviation(self) -> float:
        return max((abs(w - self.expected) for w in self.windings), default=0.0)

    @property
    def within_bound(self) -> bool:
        return self.max_deviation <= WINDING_SLACK


def _unit_tangent(x: np.ndarray, toward: np.ndarray) -> np.ndarray:
    v = toward + mink(toward, x) * x
    return v / lib(x).sqrt(mink(v, v))


def winding_diagnostic(rep, c: DehnCoords) -> list[WindingReport]:
    """Winding of every strand of the geodesic realization of ``c`` across the
    standard collar of each crossed pants curve.

    ``rep`` is a :class:`~currents_lab.hyperbolic.HolonomyRep` (its surface is
    used).  A strand meeting the core at angle ``phi`` (measured from the
    positive direction of the ``a`` side of the ``H`` tile) stays in the
    collar of width ``r`` over a projection of ``2 asinh(tanh r cot phi)``.
    Findings with ``|w - t_i/m_i| > 5`` are reported, not raised.
    """
    from .hyperbolic import collar

    surface = rep.surface
    topo = surface.topo
    c = canonicalize(c)
    sc = assemble(topo, c)
    reports = {i: WindingReport(i, c.t[i] / c.m[i], [], []) for i in range(len(c)) if c.m[i]}
    with mpmath.workdps(rep.dps or DPS):
        for comp in sc.components:
            if comp.is_pants_curve:
                continue
            for cr in locate_crossings(surface, comp):
                ell = float(surface.lengths[cr.cuff])
                r = collar(ell).width
                tile = surface.tiles[cr.tile]
                side = cr.side
                start, end = tile.vertices[side], tile.vertices[(side + 1) % 6]
                # the a side of the mirror tile runs against the H tile's orientation
                sign = -1 if tile.mirror else 1
                # the crossing may sit on a vertex (tau = 0 puts symmetric curves there)
                far = end
                if -mink(cr.point, end) < -mink(cr.point, start):
                    far, sign = start, -sign
                u = sign * _unit_tangent(cr.point, far)
                v = _unit_tangent(cr.point, cr.forward)
                cos_phi = float(mink(u, v))
                phi = math.acos(max(-1.0, min(1.0, cos_phi)))
                w = 2 * math.asinh(math.tanh(r) * cos_phi / math.sin(phi)) / ell
                # orient so that positive twist coordinates give positive windings
                reports[cr.cuff].windings.append(-w)
                reports[cr.cuff].angles.append(phi)
    return [reports[i] for i in sorted(reports)]
