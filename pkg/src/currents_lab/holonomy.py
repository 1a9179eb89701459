"""Fenchel-Nielsen gluing of right-angled hexagons.

Every pants ``s`` is the union of two right-angled hexagons, ``H_s`` (tile
``2s``) and its mirror ``H_s*`` (tile ``2s+1``).  Each tile carries its own
model in the upper half plane; a *transition* is a 2x2 real matrix ``G``
(determinant 1) sending the model of the tile entered into the model of the
tile left, so products of transitions along a tile path develop the path.

Frames: a matrix ``F`` stands for the unit tangent vector ``F(i, up)``.
``F @ walk(d)`` moves forward by ``d``; ``F @ turn(a)`` turns left by ``a``.
Orientation-reversing isometries are matrices of determinant -1 acting by
``z -> (a conj(z) + b) / (c conj(z) + d)``.

Letters of the tile groupoid (at zero twist they are the dual-graph edges):

* ``("b", s, n)``: ``H_s -> H_s*`` across ``b_n``.
* ``("a", i, h)``: across curve ``i`` from the first slot of ``cuff_slots[i]``
  to the second, between ``H`` halves (``h = 0``) or ``H*`` halves (``h = 1``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import ConstructionError, DomainError, FormatError, ShapeError
from .topology import REAL, SurfaceTopology, _numbers, _split_fields

J = np.array([[-1.0, 0.0], [0.0, 1.0]])
I2 = np.eye(2)
HALF_TURN = np.array([[0.0, 1.0], [-1.0, 0.0]])


def lib(x):
    """``math`` or ``mpmath``, matching the scalar type of ``x``."""
    if isinstance(x, np.ndarray):
        x = x.flat[0]
    return mpmath if isinstance(x, mpmath.mpf) else math


def walk(d) -> np.ndarray:
    e = lib(d).exp(d / 2)
    return np.array([[e, 0 * e], [0 * e, 1 / e]])


def turn(a) -> np.ndarray:
    m = lib(a)
    c, s = m.cos(a / 2), m.sin(a / 2)
    return np.array([[c, s], [-s, c]])


def quarter(sign: int, like=0.0) -> np.ndarray:
    """Left (``sign = 1``) or right quarter turn, in the precision of ``like``."""
    r = lib(like).sqrt(2 + 0 * like) / 2
    return np.array([[r, sign * r], [-sign * r, r]])


def inv(g: np.ndarray) -> np.ndarray:
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    det = a * d - b * c
    return np.array([[d, -b], [-c, a]]) / det


def reflection(frame: np.ndarray) -> np.ndarray:
    """Reflection in the geodesic through the frame's base point and direction."""
    return frame @ J @ inv(frame)


# hyperboloid model -----------------------------------------------------------
# z = x + iy  <->  S = (1/y)[[x^2+y^2, x], [x, 1]]  <->  X = ((A+C)/2, (A-C)/2, B)
# An isometry g acts by S -> g S g^T; lorentz(g) is that action on X.

MINK = np.diag([-1.0, 1.0, 1.0])


def lorentz(g: np.ndarray) -> np.ndarray:
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    # images of the basis vectors e0=(1,0,0) <-> S=I, e1 <-> diag(1,-1), e2 <-> [[0,1],[1,0]]
    cols = []
    for S in (I2, np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])):
        T = g @ S @ g.T
        cols.append([(T[0, 0] + T[1, 1]) / 2, (T[0, 0] - T[1, 1]) / 2, T[0, 1]])
    return np.array(cols).T


def mink(x: np.ndarray, y: np.ndarray):
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


def cross3(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.array(
        [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
    )


ORIGIN = np.array([1.0, 0.0, 0.0])


def point_of(frame: np.ndarray) -> np.ndarray:
    return lorentz(frame) @ ORIGIN


def klein(x: np.ndarray) -> np.ndarray:
    return np.array([x[1] / x[0], x[2] / x[0]])


def from_klein(k: np.ndarray) -> np.ndarray:
    w = 1 / lib(k).sqrt(max(1e-300, 1 - k[0] * k[0] - k[1] * k[1]))
    return np.array([w, k[0] * w, k[1] * w])


def _dominant(g: np.ndarray) -> np.ndarray:
    """Null vector of the attracting fixed point of a determinant-one hyperbolic ``g``."""
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    tr = a + d
    disc = tr * tr - 4.0
    if disc <= 0:
        raise ValueError("element is not hyperbolic")
    root = lib(disc).sqrt(disc)
    big = (tr + root) / 2 if tr > 0 else (tr - root) / 2
    # eigenvector from the better conditioned row of g - big
    r1 = np.array([b, big - a])
    r2 = np.array([big - d, c])
    v = r1 if r1[0] ** 2 + r1[1] ** 2 >= r2[0] ** 2 + r2[1] ** 2 else r2
    x = np.array([(v[0] ** 2 + v[1] ** 2) / 2, (v[0] ** 2 - v[1] ** 2) / 2, v[0] * v[1]])
    return x / x[0]


def fixed_points(g: np.ndarray, g_inv: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Ideal fixed points of a hyperbolic element as null vectors, (repelling, attracting).

    Both are computed as attracting points (of ``g_inv`` and ``g``): the
    eigenvector of the small eigenvalue of a long product is poorly
    conditioned, so pass an independently multiplied inverse when available.
    """
    # callers pass determinant-one products; recomputing det would cancel catastrophically
    if g_inv is None:
        g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
    return _dominant(g_inv), _dominant(g)


def _frob(m: np.ndarray) -> float:
    return math.sqrt(sum(float(x) ** 2 for x in m.flat))


# hexagons ------------------------------------------------------------------


def opposite_side(x, y, z):
    """Length of the side of a right-angled hexagon opposite the side ``z``,
    between the sides ``x`` and ``y`` (alternate sides ``x, y, z``)."""
    m = lib(x)
    ch = (m.cosh(z) + m.cosh(x) * m.cosh(y)) / (m.sinh(x) * m.sinh(y))
    return m.acosh(ch)


@dataclass(frozen=True)
class Hexagon:
    """Right-angled hexagon with alternate sides ``lam`` (the ``a`` sides).

    ``frames[k]`` is the frame at the start of side k (order a0 b0 a1 b1 a2
    b2), expressed in coordinates where the midpoint of ``b0`` is ``i`` with
    ``b0`` pointing up.
    """

    lam: tuple[float, float, float]
    blen: tuple[float, float, float]
    frames: tuple
    closure: float

    @property
    def lengths(self) -> tuple[float, ...]:
        a, b = self.lam, self.blen
        return (a[0], b[0], a[1], b[1], a[2], b[2])


def build_hexagon(lam: Sequence) -> Hexagon:
    """Hexagon with alternate sides ``lam``; ``mpmath`` inputs give an ``mpmath`` hexagon."""
    l0, l1, l2 = (x if isinstance(x, mpmath.mpf) else float(x) for x in lam)
    if min(l0, l1, l2) <= 0:
        raise DomainError("hexagon sides must be positive")
    b0 = opposite_side(l0, l1, l2)
    b1 = opposite_side(l1, l2, l0)
    b2 = opposite_side(l2, l0, l1)
    lengths = (l0, b0, l1, b1, l2, b2)
    frames: list = [None] * 6
    # walk forward from the midpoint of b0 to a1, b1, a2
    left, right = quarter(1, l0), quarter(-1, l0)
    f = walk(b0 / 2) @ left
    for k in (2, 3, 4):
        frames[k] = f
        f = f @ walk(lengths[k]) @ left
    forward_a2_end = frames[4] @ walk(lengths[4]) @ left  # frame of b2 start
    # walk backward from the midpoint of b0 to b0 start, a0, b2
    f = walk(-b0 / 2)
    frames[1] = f
    for k in (0, 5):
        f = f @ right @ walk(-lengths[k])
        frames[k] = f
    closure = min(
        float(np.max(np.abs(forward_a2_end - frames[5]))),
        float(np.max(np.abs(forward_a2_end + frames[5]))),
    )
    scale = max(1.0, float(np.max(np.abs(frames[5]))))
    if closure > 1e-6 * scale * scale:
        raise ConstructionError(f"hexagon failed to close (residual {closure:.3g})")
    return Hexagon((l0, l1, l2), (b0, b1, b2), tuple(frames), closure / (scale * scale))


# surface ----------------------------------------------------------------------


@dataclass(frozen=True)
class FNCoords:
    lengths: tuple
    twists: tuple

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        object.__setattr__(self, "twists", tuple(float(x) for x in self.twists))
        if len(self.lengths) != len(self.twists):
            raise ShapeError("lengths and twists must have the same length")
        if any(not x > 0 for x in self.lengths):
            raise DomainError("all lengths must be positive")

    @classmethod
    def untwisted(cls, lengths: Iterable[float]) -> "FNCoords":
        lengths = tuple(lengths)
        return cls(lengths, (0.0,) * len(lengths))


def parse_fn(text: str) -> FNCoords:
    """Parse ``l=<list>; tau=<list>`` (``lengths``/``twists`` also accepted; twists default to zero)."""
    f = _split_fields(text)
    raw_l = f.get("l", f.get("lengths"))
    raw_t = f.get("tau", f.get("twists"))
    if raw_l is None:
        raise FormatError("missing field 'l'")
    lengths = _numbers(raw_l, REAL)
    twists = _numbers(raw_t, REAL) if raw_t is not None else [0.0] * len(lengths)
    if "g" in f and len(lengths) != 3 * int(f["g"]) - 3:
        raise ShapeError(f"genus {f['g']} needs {3 * int(f['g']) - 3} lengths")
    return FNCoords(lengths, twists)


def format_fn(x: FNCoords) -> str:
    return f"l={','.join(repr(v) for v in x.lengths)}; tau={','.join(repr(v) for v in x.twists)}"


@dataclass
class Tile:
    index: int
    pants: int
    mirror: bool
    frames: tuple  # side-start frames in this tile's model
    vertices: np.ndarray  # 6 x 3 hyperboloid points, vertex k starts side k
    kvertices: np.ndarray  # 6 x 2 Klein coordinates


Letter = tuple  # ("a", i, h) or ("b", s, n)
Step = tuple  # (letter, +1 | -1)


class Surface:
    """Hexagon tiles of a marked hyperbolic surface with their gluing maps.

    The twist ``tau_i`` slides the two sides of curve ``i`` by ``-tau_i``, which
    makes ``tau_i -> tau_i + ell_i`` act on lengths like one right Dehn twist:
    ``length(D(m, t), tau + ell e_i) == length(D(m, t + m_i e_i), tau)``.

    With ``dps`` set, all geometry is carried in ``mpmath`` numbers; the
    caller must keep ``mpmath.mp.dps`` at least that large while using it.
    """

    def __init__(self, topo: SurfaceTopology, fn: FNCoords, dps: int | None = None):
        if len(fn.lengths) != topo.num_curves:
            raise ShapeError(f"expected {topo.num_curves} FN pairs, got {len(fn.lengths)}")
        self.topo = topo
        self.fn = fn
        self.dps = dps
        conv = mpmath.mpf if dps else float
        self.lengths = tuple(conv(x) for x in fn.lengths)
        self.twists = tuple(conv(x) for x in fn.twists)
        self.hexagons = []
        self.tiles: list[Tile] = []
        for s, triple in enumerate(topo.pants_boundaries):
            hexa = build_hexagon([self.lengths[i] / 2 for i in triple])
            self.hexagons.append(hexa)
            for mirror in (False, True):
                frames = hexa.frames if not mirror else tuple(J @ f @ J for f in hexa.frames)
                verts = np.array([point_of(f) for f in frames])
                self.tiles.append(
                    Tile(2 * s + mirror, s, mirror, frames, verts, verts[:, 1:] / verts[:, :1])
                )
        self._letters: dict = {}

    # geometry helpers
    def side_frame(self, s: int, k: int) -> np.ndarray:
        return self.hexagons[s].frames[k]

    def b_reflection(self, s: int, n: int) -> np.ndarray:
        return reflection(self.side_frame(s, 2 * n + 1))

    def slide(self, i: int):
        return -self.twists[i]

    def cuff_placement(self, s: int, p: int, shift: float) -> tuple[int, np.ndarray]:
        """Tile across curve slot ``(s, p)`` and its transition matrix.

        ``shift`` is the arc length along ``a_p`` (from its start) at which
        the path leaves ``H_s``; it selects which half of the partner pants
        is entered once the twist slide is applied.
        """
        i = self.topo.pants_boundaries[s][p]
        t, q = self.topo.partner(s, p)
        ell = self.lengths[i]
        lam = ell / 2
        delta = self.slide(i)
        w = shift - delta
        k = int(lib(w).floor(w / ell))
        r = w - k * ell
        vs = self.side_frame(s, 2 * p)
        vt_inv = inv(self.side_frame(t, 2 * q))
        if r < lam:
            return 2 * t, vs @ walk(lam + delta + k * ell) @ HALF_TURN @ vt_inv
        g = vs @ walk(lam + delta + (k + 1) * ell) @ HALF_TURN @ vt_inv
        return 2 * t + 1, g @ self.b_reflection(t, q) @ J

    def letter_matrix(self, letter: Letter) -> np.ndarray:
        got = self._letters.get(letter)
        if got is not None:
            return got
        if letter[0] == "b":
            _, s, n = letter
            g = self.b_reflection(s, n) @ J
        else:
            _, i, h = letter
            (s, p), (t, q) = self.topo.cuff_slots[i]
            ell = self.lengths[i]
            lam, delta = ell / 2, self.slide(i)
            vs, vt_inv = self.side_frame(s, 2 * p), inv(self.side_frame(t, 2 * q))
            if h == 0:
                g = vs @ walk(lam + delta) @ HALF_TURN @ vt_inv
            else:
                g = (
                    J
                    @ self.b_reflection(s, p)
                    @ vs
                    @ walk(lam + delta + ell)
                    @ HALF_TURN
                    @ vt_inv
                    @ self.b_reflection(t, q)
                    @ J
                )
        self._letters[letter] = g
        return g

    def step_matrix(self, step: Step) -> np.ndarray:
        letter, sign = step
        g = self.letter_matrix(letter)
        return g if sign > 0 else inv(g)

    def path_matrix(self, steps: Sequence[Step]) -> np.ndarray:
        m = I2.copy()
        for st in steps:
            m = m @ self.step_matrix(st)
        return m

    def vertex_relators(self) -> list[list[Step]]:
        """The 4-cycles of tiles around each hexagon vertex (6g-6 of them)."""
        out = []
        for i, ((s, p), (t, q)) in enumerate(self.topo.cuff_slots):
            # end of a_p in H_s meets the start of a_q in H_t
            out.append(
                [
                    (("a", i, 0), 1),
                    (("b", t, (q - 1) % 3), 1),
                    (("a", i, 1), -1),
                    (("b", s, p), -1),
                ]
            )
            # start of a_p in H_s meets the end of a_q in H_t
            out.append(
                [
                    (("a", i, 0), 1),
                    (("b", t, q), 1),
                    (("a", i, 1), -1),
                    (("b", s, (p - 1) % 3), -1),
                ]
            )
        return out

    def relator_residual(self) -> float:
        worst = 0.0
        for rel in self.vertex_relators():
            m = self.path_matrix(rel)
            worst = max(worst, min(_frob(m - I2), _frob(m + I2)))
        return worst

    @staticmethod
    def letter_tiles(topo: SurfaceTopology, letter: Letter) -> tuple[int, int]:
        if letter[0] == "b":
            return 2 * letter[1], 2 * letter[1] + 1
        _, i, h = letter
        (s, _), (t, _) = topo.cuff_slots[i]
        return 2 * s + h, 2 * t + h

    # crossing edges while tracing a geodesic
    def cross(self, tile: int, side: int, point: np.ndarray) -> tuple[int, np.ndarray]:
        """Leave ``tile`` through side ``side`` at hyperboloid ``point``.

        Returns ``(next_tile, G)`` with ``G`` mapping the next tile's model into
        the current one.
        """
        s, mirror = divmod(tile, 2)
        if side % 2 == 1:
            n = side // 2
            sig = self.b_reflection(s, n)
            return (2 * s + 1, sig @ J) if not mirror else (2 * s, J @ sig)
        p = side // 2
        if mirror:
            to_h = self.b_reflection(s, p) @ J
            nxt, g = self.cross(2 * s, side, lorentz(to_h) @ point)
            return nxt, J @ self.b_reflection(s, p) @ g
        frame = self.side_frame(s, side)
        x = lorentz(inv(frame)) @ point
        lb = lib(x)
        shift = lb.asinh(x[1] / lb.sqrt(max(1e-300, x[0] ** 2 - x[1] ** 2 - x[2] ** 2)))
        return self.cuff_placement(s, p, shift)

    def alpha_translation(self, s: int, p: int, n: int = 1) -> np.ndarray:
        """Translation by ``n`` times the length of the curve along the line of ``a_p`` of ``H_s``."""
        ell = self.lengths[self.topo.pants_boundaries[s][p]]
        v = self.side_frame(s, 2 * p)
        return v @ walk(n * ell) @ inv(v)
