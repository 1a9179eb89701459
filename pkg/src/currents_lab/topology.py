"""Pants/hexagon combinatorics of a closed surface and the parity lattice of
Dehn coordinates.

Curve indices, pants indices and cuff slots are 0-based throughout the code.
A pants with boundary triple ``(i, j, k)`` has hexagon sides
``a0, b0, a1, b1, a2, b2`` in counter-clockwise order, where ``a0`` lies on
curve ``i``, ``a1`` on ``j`` and ``a2`` on ``k``; ``b_n`` joins ``a_n`` to
``a_{n+1}``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import FormatError, InvalidGenusError, ParityError, ShapeError

INTEGER = "integer"
REAL = "real"

HEXAGON_SIDES = ("a0", "b0", "a1", "b1", "a2", "b2")


@dataclass(frozen=True)
class SurfaceTopology:
    genus: int
    pants_boundaries: tuple[tuple[int, int, int], ...]
    num_curves: int = field(init=False)
    num_pants: int = field(init=False)
    hexagon_side_order: tuple[tuple[str, ...], ...] = field(init=False)
    # cuff_slots[i] = ((s, p), (t, q)): the two pants slots glued along curve i
    cuff_slots: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = field(init=False)

    def __post_init__(self):
        if self.genus < 2:
            raise InvalidGenusError(f"genus must be >= 2, got {self.genus}")
        n = 3 * self.genus - 3
        object.__setattr__(self, "num_curves", n)
        object.__setattr__(self, "num_pants", 2 * self.genus - 2)
        object.__setattr__(
            self, "hexagon_side_order", tuple(HEXAGON_SIDES for _ in self.pants_boundaries)
        )
        if len(self.pants_boundaries) != self.num_pants:
            raise ShapeError("wrong number of pants")
        slots: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for s, triple in enumerate(self.pants_boundaries):
            for p, i in enumerate(triple):
                if not 0 <= i < n:
                    raise ShapeError(f"curve index {i} out of range")
                slots[i].append((s, p))
        if any(len(x) != 2 for x in slots):
            raise ShapeError("each curve must bound exactly two pants slots")
        object.__setattr__(self, "cuff_slots", tuple((a, b) for a, b in slots))
        if not self._connected():
            raise ShapeError("pants adjacency graph is disconnected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            s = stack.pop()
            for (a, _), (b, _) in self.cuff_slots:
                for x, y in ((a, b), (b, a)):
                    if x == s and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == self.num_pants

    def partner(self, s: int, p: int) -> tuple[int, int]:
        """The pants slot glued to slot ``p`` of pants ``s``."""
        i = self.pants_boundaries[s][p]
        a, b = self.cuff_slots[i]
        return b if a == (s, p) else a


@dataclass(frozen=True)
class DehnCoords:
    m: tuple
    t: tuple
    ring: str = INTEGER

    def __post_init__(self):
        if len(self.m) != len(self.t):
            raise ShapeError("m and t must have the same length")
        if self.ring == INTEGER:
            object.__setattr__(self, "m", tuple(_as_int(x) for x in self.m))
            object.__setattr__(self, "t", tuple(_as_int(x) for x in self.t))
        elif self.ring == REAL:
            object.__setattr__(self, "m", tuple(float(x) for x in self.m))
            object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        else:
            raise ValueError(f"unknown ring tag {self.ring!r}")

    def __len__(self) -> int:
        return len(self.m)

    @property
    def genus(self) -> int:
        return len(self.m) // 3 + 1

    def is_zero(self) -> bool:
        return not any(self.m) and not any(self.t)

    def scaled(self, k) -> "DehnCoords":
        return DehnCoords(tuple(k * x for x in self.m), tuple(k * x for x in self.t), self.ring)

    def __add__(self, other: "DehnCoords") -> "DehnCoords":
        ring = INTEGER if self.ring == other.ring == INTEGER else REAL
        return DehnCoords(
            tuple(a + b for a, b in zip(self.m, other.m)),
            tuple(a + b for a, b in zip(self.t, other.t)),
            ring,
        )

    @classmethod
    def zero(cls, n: int) -> "DehnCoords":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def alpha(cls, n: int, index: int, weight: int = 1) -> "DehnCoords":
        """Coordinates of ``weight`` parallel copies of the pants curve ``index``."""
        t = [0] * n
        t[index] = weight
        return cls((0,) * n, tuple(t))


def _as_int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if float(x) != int(x):
        raise ValueError(f"non-integer value {x!r} in integer coordinates")
    return int(x)


def build_chain_topology(genus: int) -> SurfaceTopology:
    """Fixed linear-chain pants graph.

    Genus 2: two pants glued along all three cuffs, ``(0, 1, 2)`` and
    ``(0, 2, 1)``; here the transverse system has three components.
    Higher genus: a one-holed torus at each end of a chain of pants pairs.
    """
    if genus < 2:
        raise InvalidGenusError(f"genus must be >= 2, got {genus}")
    if genus == 2:
        return SurfaceTopology(2, ((0, 1, 2), (0, 2, 1)))
    n = 3 * genus - 3
    pants = [(0, 0, 1)]
    c = 1
    while c + 3 < n:
        pants.append((c, c + 1, c + 2))
        pants.append((c + 1, c + 2, c + 3))
        c += 3
    pants.append((n - 2, n - 1, n - 1))
    return SurfaceTopology(genus, tuple(pants))


def _check_dims(topo: SurfaceTopology, c: DehnCoords) -> None:
    if len(c.m) != topo.num_curves:
        raise ShapeError(f"expected {topo.num_curves} coordinates, got {len(c.m)}")


def check_parity(topo: SurfaceTopology, c: DehnCoords) -> bool:
    _check_dims(topo, c)
    if c.ring != INTEGER:
        raise ShapeError("parity is only defined for integer coordinates")
    return all((c.m[i] + c.m[j] + c.m[k]) % 2 == 0 for i, j, k in topo.pants_boundaries)


def require_parity(topo: SurfaceTopology, c: DehnCoords) -> None:
    if not check_parity(topo, c):
        raise ParityError(f"coordinates {c.m} violate the pants parity condition")


def canonicalize(c: DehnCoords) -> DehnCoords:
    """Representative in the positive cone: ``m >= 0``, and ``t >= 0`` where ``m = 0``."""
    m, t = list(c.m), list(c.t)
    for i in range(len(m)):
        if m[i] < 0 or (m[i] == 0 and t[i] < 0):
            m[i], t[i] = -m[i], -t[i]
        if m[i] == 0:
            m[i] = abs(m[i])  # no -0.0 in the real case
    return DehnCoords(tuple(m), tuple(t), c.ring)


def is_canonical(c: DehnCoords) -> bool:
    return all(mi > 0 or (mi == 0 and ti >= 0) for mi, ti in zip(c.m, c.t))


def lattice_covolume(topo: SurfaceTopology) -> Fraction:
    """Index of the parity lattice in the full integer lattice, ``2^(2g-2)``."""
    return Fraction(2 ** (2 * topo.genus - 2))


def parity_class_fraction(topo: SurfaceTopology) -> Fraction:
    """Fraction of residues ``m mod 2`` passing the parity test (brute force)."""
    n = topo.num_curves
    good = 0
    for bits in itertools.product((0, 1), repeat=n):
        good += all((bits[i] + bits[j] + bits[k]) % 2 == 0 for i, j, k in topo.pants_boundaries)
    return Fraction(good, 2**n)


def twist_action(c: DehnCoords, index: int, n: int) -> DehnCoords:
    """Coordinates after ``n`` right Dehn twists about pants curve ``index``."""
    if not 0 <= index < len(c.m):
        raise ShapeError(f"curve index {index} out of range")
    if c.m[index] == 0 or n == 0:
        return c
    t = list(c.t)
    t[index] = t[index] + n * c.m[index]
    return DehnCoords(c.m, tuple(t), c.ring)


# text format: "g=2; m=2,1,1; t=3,0,0"

_FIELD = re.compile(r"^\s*(\w+)\s*=\s*(.*?)\s*$")


def _split_fields(text: str) -> dict[str, str]:
    out = {}
    for chunk in re.split(r"[;\n]", text):
        if not chunk.strip() or chunk.strip().startswith("#"):
            continue
        mt = _FIELD.match(chunk)
        if not mt:
            raise FormatError(f"cannot parse {chunk!r}")
        out[mt.group(1).lower()] = mt.group(2)
    return out


def _numbers(s: str, ring: str) -> list:
    items = [x for x in re.split(r"[,\s]+", s.strip()) if x]
    if ring == INTEGER:
        try:
            return [int(x) for x in items]
        except ValueError as exc:
            raise FormatError(f"integer coordinates expected in {s!r}") from exc
    return [float(x) for x in items]


def parse_coords(text: str, ring: str | None = None) -> tuple[int, DehnCoords]:
    """Parse ``g=<genus>; m=<list>; t=<list>``; returns ``(genus, coords)``."""
    f = _split_fields(text)
    try:
        genus = int(f["g"])
        m_raw, t_raw = f["m"], f["t"]
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from exc
    if ring is None:
        ring = REAL if re.search(r"[.eE]", m_raw + t_raw) else INTEGER
    m, t = _numbers(m_raw, ring), _numbers(t_raw, ring)
    n = 3 * genus - 3
    if len(m) != n or len(t) != n:
        raise ShapeError(f"genus {genus} needs {n} entries in m and t")
    return genus, DehnCoords(tuple(m), tuple(t), ring)


def format_coords(genus: int, c: DehnCoords) -> str:
    def fmt(v):
        return ",".join(str(x) if c.ring == INTEGER else repr(float(x)) for x in v)

    return f"g={genus}; m={fmt(c.m)}; t={fmt(c.t)}"
