"""A one-relator presentation of the surface group and curve words.

The tile groupoid (tiles ``H_s``, ``H_s*``; letters across ``a`` and ``b``
sides) has the 4-cycles around hexagon vertices as relators.  Contracting a
spanning tree of tiles and eliminating generators that occur once in some
relator (Tietze moves) leaves ``2g`` generators and a single relator.  The
result depends only on the topology, so words are FN-independent.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import ConstructionError
from .topology import SurfaceTopology

Word = tuple  # tuple of (generator, +1 | -1)


def free_reduce(word: Sequence) -> list:
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return out


def cyclic_reduce(word: Sequence) -> list:
    w = free_reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i][0] == w[j][0] and w[i][1] == -w[j][1]:
        i += 1
        j -= 1
    return w[i : j + 1]


def invert(word: Sequence) -> list:
    return [(g, -e) for g, e in reversed(word)]


def cyclic_rotations(word: Sequence) -> list[tuple]:
    w = tuple(word)
    return [w[k:] + w[:k] for k in range(len(w))] or [()]


def same_cyclic_word(u: Sequence, v: Sequence) -> bool:
    return tuple(v) in set(cyclic_rotations(u))


def _all_letters(topo: SurfaceTopology) -> list:
    letters = [("b", s, n) for s in range(topo.num_pants) for n in range(3)]
    letters += [("a", i, h) for i in range(topo.num_curves) for h in (0, 1)]
    return letters


def _vertex_relators(topo: SurfaceTopology) -> list[list]:
    out = []
    for i, ((s, p), (t, q)) in enumerate(topo.cuff_slots):
        out.append([(("a", i, 0), 1), (("b", t, (q - 1) % 3), 1), (("a", i, 1), -1), (("b", s, p), -1)])
        out.append([(("a", i, 0), 1), (("b", t, q), 1), (("a", i, 1), -1), (("b", s, (p - 1) % 3), -1)])
    return out


@dataclass(frozen=True)
class Marking:
    topo: SurfaceTopology
    tree: frozenset  # groupoid letters contracted to the identity
    generators: tuple  # surviving groupoid letters, generator k is generators[k]
    images: dict  # groupoid letter -> word in generator indices
    relator: Word
    tree_paths: dict  # tile -> groupoid path from the base tile (tile 0)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def word_of_path(self, path: Sequence) -> list:
        w: list = []
        for letter, sign in path:
            img = self.images[letter]
            w.extend(img if sign > 0 else invert(img))
        return free_reduce(w)


@lru_cache(maxsize=None)
def marking(topo: SurfaceTopology) -> Marking:
    from .holonomy import Surface

    tiles = range(2 * topo.num_pants)
    # spanning tree: all b_0 letters (H_s -- H_s*), then h = 0 letters across curves
    tree: list = []
    comp = {t: t for t in tiles}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    candidates = [("b", s, 0) for s in range(topo.num_pants)] + [("a", i, 0) for i in range(topo.num_curves)]
    for letter in candidates:
        u, v = Surface.letter_tiles(topo, letter)
        ru, rv = find(u), find(v)
        if ru != rv:
            comp[ru] = rv
            tree.append(letter)
    if len(tree) != len(tiles) - 1:
        raise ConstructionError("tile graph is disconnected")
    tree_set = frozenset(tree)

    # tree paths from tile 0
    paths = {0: []}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for letter in tree:
            a, b = Surface.letter_tiles(topo, letter)
            for x, y, sgn in ((a, b, 1), (b, a, -1)):
                if x == u and y not in paths:
                    paths[y] = paths[u] + [(letter, sgn)]
                    frontier.append(y)

    gens = [l for l in _all_letters(topo) if l not in tree_set]
    expr: dict = {}  # eliminated letter -> word in groupoid letters (still symbolic)
    rels = [
        free_reduce([(l, e) for l, e in r if l not in tree_set]) for r in _vertex_relators(topo)
    ]
    alive = list(gens)
    while len(rels) > 1:
        best = None
        for ri, r in enumerate(rels):
            counts: dict = {}
            for l, _ in r:
                counts[l] = counts.get(l, 0) + 1
            for l, c in counts.items():
                if c == 1:
                    key = (len(r), ri, alive.index(l))
                    if best is None or key < best[0]:
                        best = (key, ri, l)
        if best is None:
            raise ConstructionError("Tietze elimination stalled")
        _, ri, x = best
        r = rels.pop(ri)
        k = next(j for j, (l, _) in enumerate(r) if l == x)
        e = r[k][1]
        u, v = r[:k], r[k + 1 :]
        # u x^e v = 1
        sol = free_reduce(invert(u) + invert(v)) if e > 0 else free_reduce(v + u)
        expr[x] = sol
        alive.remove(x)

        def subst(word):
            out = []
            for l, s in word:
                if l == x:
                    out.extend(sol if s > 0 else invert(sol))
                else:
                    out.append((l, s))
            return out

        rels = [cyclic_reduce(subst(rr)) for rr in rels]
        for y in list(expr):
            if y != x:
                expr[y] = free_reduce(subst(expr[y]))
    rels = [r for r in rels]
    if len(alive) != 2 * topo.genus:
        raise ConstructionError(f"expected {2 * topo.genus} generators, got {len(alive)}")
    index = {l: k for k, l in enumerate(alive)}
    images: dict = {}
    for l in _all_letters(topo):
        if l in tree_set:
            images[l] = ()
        elif l in index:
            images[l] = ((index[l], 1),)
        else:
            images[l] = tuple((index[y], s) for y, s in expr[l])
    relator = tuple((index[l], s) for l, s in rels[0])
    return Marking(topo, tree_set, tuple(alive), images, relator, paths)


@dataclass(frozen=True)
class CurveWord:
    letters: Word  # cyclically reduced word in generator indices
    component_ref: int | None = None
    path: tuple = ()  # tile-groupoid path the word was read from
    start_tile: int = 0

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "CurveWord":
        return CurveWord(tuple(invert(self.letters)), self.component_ref, tuple(invert(self.path)), self.start_tile)

    def text(self) -> str:
        """``x0 X1 ...``: lower case for a generator, upper case for its inverse."""
        return " ".join(f"x{g}" if e > 0 else f"X{g}" for g, e in self.letters)


def to_word(topo: SurfaceTopology, component, component_ref: int | None = None) -> CurveWord:
    """Cyclically reduced generator word of a curve component (from ``assemble``)."""
    from .curves import pants_curve_path

    mk = marking(topo)
    if component.start is None:
        i = component.coords.t.index(max(component.coords.t))
        start_tile = 2 * topo.cuff_slots[i][0][0]
        path = tuple(pants_curve_path(topo, i))
    else:
        start_tile = 2 * component.start[0]
        path = tuple(component.path)
    w = cyclic_reduce(mk.word_of_path(path))
    return CurveWord(tuple(w), component_ref, path, start_tile)
