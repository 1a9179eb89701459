"""Samplers over Dehn coordinates and Monte Carlo estimators.

Randomness is drawn in fixed blocks of ``BLOCK`` samples; block ``b`` of a
run with seed ``s`` uses the stream ``SeedSequence([s, b, role])``.  Results
therefore depend only on ``(seed, n)``, never on the number of workers.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetError, DomainError, ShapeError
from .holonomy import FNCoords
from .hyperbolic import K_LEN, Log, fn_to_holonomy, length_estimate_arrays, multicurve_length
from .intersection import ENVELOPE
from .topology import REAL, DehnCoords, SurfaceTopology, build_chain_topology, parity_class_fraction

CUBE, SIMPLEX, LATTICE = "cube", "simplex", "lattice"
KINDS = (CUBE, SIMPLEX, LATTICE)
BLOCK = 4096
LATTICE_BUDGET = 10**7
EXACT_SCALE = 1000  # rounding scale k for exact lengths of real coordinates

# stream roles
_FIRST, _SECOND = 0, 1


@dataclass(frozen=True)
class SampleModel:
    kind: str
    fn: FNCoords
    seed: int = 0
    T: float | None = None  # lattice mode only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.kind == LATTICE and not (self.T and self.T > 0):
            raise DomainError("lattice mode needs a positive scale T")

    @property
    def num_curves(self) -> int:
        return len(self.fn.lengths)

    @property
    def genus(self) -> int:
        return self.num_curves // 3 + 1


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    count: int
    seed: int

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr


def _estimate(values: np.ndarray, seed: int) -> MCEstimate:
    n = len(values)
    sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return MCEstimate(float(np.mean(values)), sd / math.sqrt(n), n, seed)


def _rng(seed: int, block: int, role: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block, role]))


def _draw_block(model: SampleModel, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    ell = np.asarray(model.fn.lengths)
    N = len(ell)
    logs = np.array([Log(1 / l) for l in ell])
    if model.kind == CUBE:
        m = rng.uniform(0.0, 1.0, (BLOCK, N)) / logs
        t = rng.uniform(-1.0, 1.0, (BLOCK, N)) / ell
        return m, t
    if model.kind == SIMPLEX:
        # uniform on {x >= 0, sum x <= 1} in 2N dims: normalized exponentials with a slack coordinate
        e = rng.exponential(1.0, (BLOCK, 2 * N + 1))
        x = e / e.sum(axis=1, keepdims=True)
        signs = rng.choice(np.array([-1.0, 1.0]), (BLOCK, N))
        m = x[:, :N] / (2 * logs)
        t = signs * x[:, N : 2 * N] / ell
        return m, t
    raise DomainError("lattice blocks are drawn from the enumeration")


def _blocks(n: int) -> int:
    return (n + BLOCK - 1) // BLOCK


def sample_arrays(model: SampleModel, n: int, role: int = _FIRST) -> tuple[np.ndarray, np.ndarray]:
    """``n`` samples as arrays ``(m, t)`` of shape ``(n, 3g-3)``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if model.kind == LATTICE:
        return _lattice_sample(model, n, role)
    ms, ts = [], []
    for b in range(_blocks(n)):
        m, t = _draw_block(model, _rng(model.seed, b, role))
        ms.append(m)
        ts.append(t)
    return np.concatenate(ms)[:n], np.concatenate(ts)[:n]


def sample(model: SampleModel, n: int) -> Iterator[DehnCoords]:
    m, t = sample_arrays(model, n)
    ring = "integer" if model.kind == LATTICE else REAL
    for row_m, row_t in zip(m, t):
        if ring == "integer":
            yield DehnCoords(tuple(int(x) for x in row_m), tuple(int(x) for x in row_t))
        else:
            yield DehnCoords(tuple(row_m), tuple(row_t), REAL)


def _map_blocks(fn, n: int, workers: int) -> np.ndarray:
    blocks = range(_blocks(n))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(fn, blocks))
    else:
        parts = [fn(b) for b in blocks]
    return np.concatenate(parts)[:n]


# intersection expectations ----------------------------------------------------


def _pants_sums(topo: SurfaceTopology, m: np.ndarray) -> np.ndarray:
    return np.stack([m[:, list(tri)].sum(axis=1) for tri in topo.pants_boundaries], axis=1)


@dataclass(frozen=True)
class IIEstimate:
    main: MCEstimate  # E sum |m_i t'_i - m'_i t_i|
    envelope: MCEstimate  # E of the error envelope 22 sum m m' + pants term / 2

    @property
    def mean(self) -> float:
        return self.main.mean


def mc_expect_ii(model: SampleModel, n: int, workers: int = 1) -> IIEstimate:
    """Monte Carlo ``E(i(C, C'))`` over independent pairs from the model."""
    if n < 2:
        raise DomainError("n must be >= 2")
    topo = build_chain_topology(model.genus)

    def block(b):
        if model.kind == LATTICE:
            raise DomainError("pair expectations use the cube or simplex model")
        m1, t1 = _draw_block(model, _rng(model.seed, b, _FIRST))
        m2, t2 = _draw_block(model, _rng(model.seed, b, _SECOND))
        main = np.abs(m1 * t2 - m2 * t1).sum(axis=1)
        env = ENVELOPE * (m1 * m2).sum(axis=1) + 0.5 * (_pants_sums(topo, m1) * _pants_sums(topo, m2)).sum(axis=1)
        return np.stack([main, env], axis=1)

    vals = _map_blocks(block, n, workers)
    return IIEstimate(_estimate(vals[:, 0], model.seed), _estimate(vals[:, 1], model.seed))


def mc_expect_pairing(model: SampleModel, probe: DehnCoords, n: int, workers: int = 1) -> MCEstimate:
    """Monte Carlo ``E(sum |m_i t'_i - m'_i t_i|)`` against a fixed probe multicurve."""
    pm = np.asarray(probe.m, dtype=float)
    pt = np.asarray(probe.t, dtype=float)
    if len(pm) != model.num_curves:
        raise ShapeError("probe has the wrong dimension")

    def block(b):
        m, t = _draw_block(model, _rng(model.seed, b, _FIRST))
        return np.abs(m * pt - pm * t).sum(axis=1)

    return _estimate(_map_blocks(block, n, workers), model.seed)


# lengths ------------------------------------------------------------------------


def round_to_lattice(m: Sequence[float], t: Sequence[float], k: int) -> DehnCoords:
    """Integer point near ``k (m, t)``; ``m`` is rounded to even integers so every
    pants parity condition holds."""
    mm = tuple(2 * int(round(k * abs(x) / 2)) for x in m)
    tt = tuple(int(round(k * y)) for y in t)
    # canonical cone: t >= 0 where m = 0 (a pants curve has no sign)
    tt = tuple(abs(b) if a == 0 else b for a, b in zip(mm, tt))
    return DehnCoords(mm, tt)


def mc_expect_length(
    model: SampleModel,
    y: FNCoords,
    n: int,
    mode: str = "estimate",
    k: int = EXACT_SCALE,
    workers: int = 1,
) -> MCEstimate:
    """Monte Carlo ``E(l_Y(C))`` for ``C`` drawn from ``model`` (over ``X = model.fn``).

    ``estimate`` uses ``sum 2 m_i Log(1/l_i) + |t_i| l_i`` with the lengths of
    ``Y``; ``exact`` evaluates holonomy traces on ``round(k C) / k``.
    """
    if mode == "estimate":

        def block(b):
            m, t = _draw_block(model, _rng(model.seed, b, _FIRST))
            return length_estimate_arrays(y.lengths, m, t)

        return _estimate(_map_blocks(block, n, workers), model.seed)
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    topo = build_chain_topology(model.genus)
    rep = fn_to_holonomy(topo, y)
    m, t = sample_arrays(model, n)
    vals = np.array([multicurve_length(rep, round_to_lattice(a, b, k)) / k for a, b in zip(m, t)])
    return _estimate(vals, model.seed)


# lattice points -------------------------------------------------------------------


def predicted_lattice_count(topo: SurfaceTopology, x: FNCoords, T: float) -> float:
    """Volume of ``{length estimate < T, m >= 0}`` divided by the parity index."""
    d = 2 * topo.num_curves
    vol = T**d / math.factorial(d)
    for l in x.lengths:
        vol *= (1 / (2 * Log(1 / l))) * (2 / l)
    return vol * float(parity_class_fraction(topo))


def _m_vectors(topo: SurfaceTopology, a: np.ndarray, T: float) -> Iterator[tuple]:
    N = len(a)

    def rec(prefix, budget):
        i = len(prefix)
        if i == N:
            yield tuple(prefix)
            return
        top = int(math.floor(budget / a[i] - 1e-12)) if budget > 0 else -1
        for v in range(0, top + 1):
            yield from rec(prefix + [v], budget - a[i] * v)

    for m in rec([], T):
        if all((m[i] + m[j] + m[k]) % 2 == 0 for i, j, k in topo.pants_boundaries):
            yield m


def _count_t(b: np.ndarray, free_sign: Sequence[bool], R: float) -> int:
    """Integer vectors ``t`` with ``sum b_i |t_i| < R``; ``t_i >= 0`` where not ``free_sign``."""
    N = len(b)
    if R <= 0:
        return 0
    # grid over all but the last coordinate, closed form for the last
    axes = []
    for i in range(N - 1):
        K = math.ceil(R / b[i]) - 1
        axes.append(np.arange(-K, K + 1) if free_sign[i] else np.arange(0, K + 1))
    if axes:
        grids = np.meshgrid(*axes, indexing="ij")
        used = sum(b[i] * np.abs(g) for i, g in enumerate(grids))
        rest = R - used
    else:
        rest = np.array([R])
    rest = rest[rest > 0]
    K = np.ceil(rest / b[-1]) - 1  # largest |t_last| allowed
    cnt = (2 * K + 1) if free_sign[-1] else (K + 1)
    return int(cnt.sum())


def count_lattice(
    model: SampleModel,
    T: float | None = None,
    mode: str = "estimate",
    budget: int = LATTICE_BUDGET,
) -> int:
    """Number of nonzero canonical lattice points with length below ``T``.

    ``estimate`` counts exactly for the length estimate; ``exact`` uses
    holonomy lengths over the candidates whose estimate is below
    ``K_LEN * T``.  Refuses with :class:`BudgetError` when the predicted
    number of enumerated points exceeds ``budget``.
    """
    T = model.T if T is None else T
    if not T or T <= 0:
        raise DomainError("T must be positive")
    topo = build_chain_topology(model.genus)
    x = model.fn
    scan = T if mode == "estimate" else K_LEN * T
    predicted = predicted_lattice_count(topo, x, scan)
    if predicted > budget:
        raise BudgetError(f"predicted {predicted:.3g} lattice points exceeds the budget {budget}", predicted)
    a = np.array([2 * Log(1 / l) for l in x.lengths])
    b = np.array(x.lengths, dtype=float)
    if mode == "estimate":
        total = 0
        for m in _m_vectors(topo, a, T):
            R = T - float(np.dot(a, m))
            total += _count_t(b, [mi > 0 for mi in m], R)
        return total - 1  # the empty multicurve
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    rep = fn_to_holonomy(topo, x)
    total = 0
    for c in enumerate_lattice(topo, x, scan):
        if multicurve_length(rep, c) < T:
            total += 1
    return total


def enumerate_lattice(topo: SurfaceTopology, x: FNCoords, T: float) -> Iterator[DehnCoords]:
    """Nonzero canonical lattice points with length estimate below ``T``, lexicographic in ``(m, t)``."""
    a = np.array([2 * Log(1 / l) for l in x.lengths])
    b = np.array(x.lengths, dtype=float)
    N = len(a)
    for m in _m_vectors(topo, a, T):
        R = T - float(np.dot(a, m))

        def rec(prefix, rem):
            i = len(prefix)
            if i == N:
                yield tuple(prefix)
                return
            K = math.ceil(rem / b[i]) - 1
            lo = -K if m[i] > 0 else 0
            for v in range(lo, K + 1):
                yield from rec(prefix + [v], rem - b[i] * abs(v))

        for t in rec([], R):
            if any(m) or any(t):
                yield DehnCoords(m, t)


def _lattice_sample(model: SampleModel, n: int, role: int) -> tuple[np.ndarray, np.ndarray]:
    topo = build_chain_topology(model.genus)
    if predicted_lattice_count(topo, model.fn, model.T) > LATTICE_BUDGET:
        raise BudgetError("lattice too large to sample", predicted_lattice_count(topo, model.fn, model.T))
    pts = list(enumerate_lattice(topo, model.fn, model.T))
    if not pts:
        raise DomainError("no lattice points below T")
    idx = _rng(model.seed, 0, role).integers(0, len(pts), n)
    m = np.array([pts[i].m for i in idx], dtype=np.int64)
    t = np.array([pts[i].t for i in idx], dtype=np.int64)
    return m, t
