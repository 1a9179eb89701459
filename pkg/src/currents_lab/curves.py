"""Standard-position multicurves from Dehn coordinates.

A multicurve ``D(m, t)`` is built from arc systems in every pants and
annulus strands across every cuff.  Each connected component is recorded as
a closed path in the tile groupoid of :mod:`currents_lab.holonomy`, which is
what the holonomy and the exact-intersection trace consume.

Endpoint slots on ``a_p`` of ``H_s`` are numbered ``0 .. m-1`` in the
counter-clockwise direction of ``H_s``.  Across curve ``i`` (slots
``A = (s, p)`` and ``B = (t, q)``), the strand starting at ``A``-slot ``k``
ends at ``B``-slot ``m-1-j`` with ``j = (k - t_i) mod m``, after
``floor((k - t_i) / m)`` turns around the curve, all performed on the ``A``
side (negative means turning right).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParityError, ShapeError
from .topology import INTEGER, DehnCoords, SurfaceTopology, canonicalize, check_parity, is_canonical

PAIR = "pair"
SELF = "self"


@dataclass(frozen=True)
class Arc:
    kind: str
    ends: tuple[tuple[int, int], tuple[int, int]]  # ((slot, index), (slot, index))
    # tile-groupoid steps from ends[0] to ends[1], as (("b", n), sign) with the
    # pants index filled in by assemble
    crossings: tuple = ()


@dataclass(frozen=True)
class ArcSystem:
    counts: tuple[int, int, int]
    arcs: tuple[Arc, ...]
    pants_index: int = 0

    def endpoint_counts(self) -> tuple[int, int, int]:
        c = [0, 0, 0]
        for arc in self.arcs:
            for slot, _ in arc.ends:
                c[slot] += 1
        return tuple(c)


def arc_system(counts: Sequence[int], pants_index: int = 0) -> ArcSystem:
    m = tuple(int(x) for x in counts)
    if len(m) != 3 or min(m) < 0:
        raise ShapeError("counts must be three non-negative integers")
    if sum(m) % 2:
        raise ParityError(f"odd endpoint total in {m}")
    arcs: list[Arc] = []
    big = max(range(3), key=lambda k: m[k] - m[(k + 1) % 3] - m[(k + 2) % 3])
    excess = m[big] - m[(big + 1) % 3] - m[(big + 2) % 3]
    if excess <= 0:
        # pair arcs around each corner b_p, innermost first
        for p in range(3):
            q = (p + 1) % 3
            n = (m[p] + m[q] - m[(p + 2) % 3]) // 2
            for j in range(n):
                arcs.append(Arc(PAIR, ((p, m[p] - 1 - j), (q, j))))
        return ArcSystem(m, tuple(arcs), pants_index)
    k, nxt, prv = big, (big + 1) % 3, (big + 2) % 3
    s = excess // 2
    # layout on a_k: [m_prv to a_prv] [s second ends] [m_nxt to a_nxt] [s first ends]
    for j in range(m[prv]):
        arcs.append(Arc(PAIR, ((prv, m[prv] - 1 - j), (k, j))))
    lead = m[prv] + s
    for j in range(m[nxt]):
        arcs.append(Arc(PAIR, ((k, lead + m[nxt] - 1 - j), (nxt, j))))
    for j in range(s):
        first = lead + m[nxt] + j
        second = lead - 1 - j
        arcs.append(Arc(SELF, ((k, first), (k, second)), ((k, 1), (nxt, -1))))
    return ArcSystem(m, tuple(arcs), pants_index)


@dataclass(frozen=True)
class Component:
    path: tuple  # closed tile-groupoid path starting and ending in the H tile of `start`
    coords: DehnCoords
    multiplicity: int
    start: tuple[int, int, int] | None = None  # (pants, slot, index) or None for a pants curve
    strands: tuple = ()  # debug records

    @property
    def is_pants_curve(self) -> bool:
        return not any(self.coords.m)


@dataclass(frozen=True)
class StandardCurve:
    components: tuple[Component, ...]
    source_coords: DehnCoords
    topo: SurfaceTopology

    def total(self) -> DehnCoords:
        acc = DehnCoords.zero(len(self.source_coords))
        for comp in self.components:
            acc = acc + comp.coords.scaled(comp.multiplicity)
        return acc

    def crossings(self, i: int) -> int:
        """Number of strands (with multiplicity) crossing curve ``i``."""
        return sum(c.multiplicity * c.coords.m[i] for c in self.components)

    def dump(self) -> str:
        lines = []
        for ci, comp in enumerate(self.components):
            for rec in comp.strands:
                lines.append(f"component:{ci} x{comp.multiplicity} {rec}")
            if comp.is_pants_curve:
                i = comp.coords.t.index(max(comp.coords.t))
                lines.append(f"component:{ci} x{comp.multiplicity} curve:{i}")
        return "\n".join(lines)


def _reverse(steps: Sequence) -> list:
    return [(letter, -sign) for letter, sign in reversed(steps)]


def pants_curve_path(topo: SurfaceTopology, i: int) -> tuple:
    """Loop once around pants curve ``i`` inside ``H_s`` and ``H_s*`` (turning right)."""
    (s, p), _ = topo.cuff_slots[i]
    return ((("b", s, (p - 1) % 3), 1), (("b", s, p), -1))


def assemble(topo: SurfaceTopology, c: DehnCoords) -> StandardCurve:
    if c.ring != INTEGER:
        raise ShapeError("standard curves need integer coordinates")
    if not check_parity(topo, c):
        raise ParityError(f"coordinates {c.m} violate the pants parity condition")
    if not is_canonical(c):
        raise ShapeError("coordinates must be canonical")
    n = topo.num_curves

    # arcs: endpoint (s, p, idx) -> (other endpoint, steps from this endpoint)
    arc_of: dict = {}
    for s, triple in enumerate(topo.pants_boundaries):
        system = arc_system([c.m[i] for i in triple], s)
        for arc in system.arcs:
            (p0, i0), (p1, i1) = arc.ends
            steps = []
            if arc.kind == SELF:
                # out through b_k into H*, around a_{k+1}, back through b_{k+1}
                steps = [(("b", s, p0), 1), (("b", s, (p0 + 1) % 3), -1)]
            e0, e1 = (s, p0, i0), (s, p1, i1)
            arc_of[e0] = (e1, steps, arc.kind)
            arc_of[e1] = (e0, _reverse(steps), arc.kind)

    # strands: endpoint -> (other endpoint, steps, A-side index)
    strand_of: dict = {}
    for i, ((s, p), (t, q)) in enumerate(topo.cuff_slots):
        mi, ti = c.m[i], c.t[i]
        if mi == 0:
            continue
        down = [(("b", s, (p - 1) % 3), 1), (("b", s, p), -1)]
        up = _reverse(down)
        for k in range(mi):
            j = (k - ti) % mi
            wraps = (k - ti) // mi
            steps = (down * -wraps if wraps < 0 else up * wraps) + [(("a", i, 0), 1)]
            a_end, b_end = (s, p, k), (t, q, mi - 1 - j)
            strand_of[a_end] = (b_end, steps, i, -wraps)
            strand_of[b_end] = (a_end, _reverse(steps), i, -wraps)

    seen: set = set()
    found: list[Component] = []
    for start in sorted(arc_of):
        if start in seen:
            continue
        path: list = []
        m_c, t_c = [0] * n, [0] * n
        records = []
        e = start
        while True:
            seen.add(e)
            other, steps, kind = arc_of[e]
            seen.add(other)
            path.extend(steps)
            records.append(f"pants:{e[0]} arc:{kind} slots:{e[1]}.{e[2]}-{other[1]}.{other[2]}")
            nxt, steps, i, right = strand_of[other]
            path.extend(steps)
            m_c[i] += 1
            t_c[i] += right
            records.append(f"cuff:{i} strand slots:{other[0]}.{other[1]}.{other[2]}-{nxt[0]}.{nxt[1]}.{nxt[2]} turns:{right}")
            e = nxt
            if e == start:
                break
        found.append(
            Component(tuple(path), DehnCoords(tuple(m_c), tuple(t_c)), 1, start, tuple(records))
        )

    merged: dict = {}
    order: list = []
    for comp in found:
        key = (comp.coords.m, comp.coords.t)
        if key in merged:
            old = merged[key]
            merged[key] = Component(old.path, old.coords, old.multiplicity + 1, old.start, old.strands)
        else:
            merged[key] = comp
            order.append(key)
    comps = [merged[k] for k in order]
    for i in range(n):
        if c.m[i] == 0 and c.t[i] > 0:
            comps.append(
                Component(pants_curve_path(topo, i), DehnCoords.alpha(n, i), c.t[i], None, ())
            )
    return StandardCurve(tuple(comps), c, topo)


def decompose(sc: StandardCurve) -> list[tuple[DehnCoords, int]]:
    return [(comp.coords, comp.multiplicity) for comp in sc.components]


def component_multiset(parts: Sequence[tuple[DehnCoords, int]]) -> Counter:
    out: Counter = Counter()
    for coords, mult in parts:
        out[(coords.m, coords.t)] += mult
    return out


def check_path(topo: SurfaceTopology, comp: Component) -> bool:
    """The path is a closed walk in the tile adjacency graph."""
    from .holonomy import Surface

    if comp.start is None:
        tile = 2 * topo.cuff_slots[comp.coords.t.index(1)][0][0] if comp.coords.t.count(1) else None
    else:
        tile = 2 * comp.start[0]
    cur = tile
    for letter, sign in comp.path:
        a, b = Surface.letter_tiles(topo, letter)
        src, dst = (a, b) if sign > 0 else (b, a)
        if cur is not None and src != cur:
            return False
        cur = dst
    return tile is None or cur == tile
