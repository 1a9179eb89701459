import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from currents_lab.curves import assemble
from currents_lab.errors import DomainError, NonHyperbolicError
from currents_lab.holonomy import FNCoords, format_fn, parse_fn
from currents_lab.hyperbolic import (
    K_ARC,
    RELATOR_TOL,
    Log,
    annulus_crossings,
    arc_length_estimate,
    arc_length_right_triangles,
    collar,
    cube_cx,
    exact_length,
    fn_to_holonomy,
    length_estimate,
    multicurve_length,
    shortest_word_length,
    systole_estimate,
    vol_bx_estimate,
)
from currents_lab.topology import DehnCoords, build_chain_topology, twist_action
from currents_lab.words import cyclic_rotations, invert, to_word

from .conftest import coords

TOPO = build_chain_topology(2)


def word_of(c, topo=TOPO):
    (comp,) = assemble(topo, c).components
    return to_word(topo, comp)


def test_log_floor():
    assert Log(0.5) == 1.0 and Log(math.e**3) == pytest.approx(3.0)


def test_collar_examples():
    assert collar(1.0).width == 0.0
    assert collar(0.1).width == pytest.approx(2.9932, abs=1e-4)
    assert collar(1e-3).width == pytest.approx(math.log(2e3), abs=1e-6)
    assert collar(0.3).boundary_length == 1.0
    assert math.cosh(collar(0.3).width) == pytest.approx(1 / 0.3)
    for bad in (0.0, -1.0, 1.5):
        with pytest.raises(DomainError):
            collar(bad)


def test_annulus_examples():
    assert annulus_crossings(0.2, 1.7, 0.2, 1.7) == 0
    assert annulus_crossings(0.3, 3.8, 0.0, 0.0) == 3
    assert annulus_crossings(1.3, 4.8, 1.0, 1.0) == 3


# dyadic offsets, so shifting by a deck translation is exact in floating point
offset = st.integers(-50 * 1024, 50 * 1024).map(lambda k: k / 1024)


@settings(max_examples=2000)
@given(offset, offset, offset, offset)
def test_annulus_bound(a, b, a2, b2):
    assume(a != b and a2 != b2)
    n = annulus_crossings(a, b, a2, b2)
    assert abs(n - abs((b - a) - (b2 - a2))) <= 1
    assert annulus_crossings(a + 1, b + 1, a2 + 1, b2 + 1) == n


def test_annulus_bound_bulk():
    rng = np.random.default_rng(7)
    x = rng.uniform(-20, 20, (100_000, 4))
    worst = max(abs(annulus_crossings(*r) - abs((r[1] - r[0]) - (r[3] - r[2]))) for r in x)
    assert worst <= 1


def test_arc_length_examples():
    assert arc_length_estimate(2.0, 0.0, 0.3) == 4.0
    assert arc_length_estimate(3.0, 5.0, 0.1) == pytest.approx(6.5)
    with pytest.raises(DomainError):
        arc_length_estimate(0.0, 1.0, 1.0)


def test_arc_length_against_triangles():
    for r in np.linspace(2, 12, 41):
        for w in np.linspace(-200, 200, 81):
            for L in (1e-3, 1e-2, 0.1, 0.5):
                exact = arc_length_right_triangles(r, w, L)
                assert abs(arc_length_estimate(r, w, L) - exact) <= K_ARC + 1e-12


@pytest.mark.parametrize("genus", [2, 3])
def test_holonomy_invariants(genus):
    topo = build_chain_topology(genus)
    n = topo.num_curves
    rng = np.random.default_rng(genus)
    for _ in range(5):
        x = FNCoords(rng.uniform(0.05, 3, n), rng.uniform(-1, 1, n))
        rep = fn_to_holonomy(topo, x)
        assert rep.relator_residual() < RELATOR_TOL
        assert len(rep.generators) == 2 * genus
        for i in range(n):
            assert exact_length(rep, word_of(DehnCoords.alpha(n, i), topo)) == pytest.approx(x.lengths[i], rel=1e-8)


def test_holonomy_continuity():
    c = DehnCoords((2, 1, 1), (3, -1, 0))
    w = word_of(c)
    x = FNCoords([0.5, 0.7, 0.9], [0.1, 0.2, -0.1])
    base = exact_length(fn_to_holonomy(TOPO, x), w)
    for h in (1e-4, 1e-6):
        y = FNCoords([0.5 + h, 0.7, 0.9], [0.1, 0.2 + h, -0.1])
        assert abs(exact_length(fn_to_holonomy(TOPO, y), w) - base) < 100 * h


@settings(max_examples=40)
@given(coords(bound=5), st.integers(0, 2))
def test_full_twist_matches_dehn_twist(c, i):
    x = FNCoords([0.6, 0.8, 1.1], [0.05, -0.1, 0.2])
    tw = list(x.twists)
    tw[i] += x.lengths[i]
    y = FNCoords(x.lengths, tw)
    a = multicurve_length(fn_to_holonomy(TOPO, y), c)
    b = multicurve_length(fn_to_holonomy(TOPO, x), twist_action(c, i, 1))
    assert a == pytest.approx(b, rel=1e-8)
    if c.m[i] == 0:
        assert a == pytest.approx(multicurve_length(fn_to_holonomy(TOPO, x), c), rel=1e-8)


def test_exact_length_invariances():
    rep = fn_to_holonomy(TOPO, FNCoords([0.4, 0.9, 1.3], [0.3, 0.0, -0.2]))
    w = word_of(DehnCoords((2, 1, 1), (1, 0, -2)))
    base = exact_length(rep, w)
    assert exact_length(rep, w.inverse()) == pytest.approx(base, rel=1e-10)
    for r in cyclic_rotations(w.letters):
        assert exact_length(rep, r) == pytest.approx(base, rel=1e-8)
    g = ((0, 1), (2, -1))
    conj = tuple(g) + tuple(w.letters) + tuple(invert(g))
    assert exact_length(rep, conj) == pytest.approx(base, rel=1e-8)
    with pytest.raises(NonHyperbolicError):
        exact_length(rep, ())


def test_word_length_equals_multicurve_length():
    rep = fn_to_holonomy(TOPO, FNCoords.untwisted([0.3, 0.4, 0.5]))
    c = DehnCoords((4, 2, 2), (3, 1, 0))
    sc = assemble(TOPO, c)
    by_words = sum(k.multiplicity * exact_length(rep, to_word(TOPO, k)) for k in sc.components)
    assert multicurve_length(rep, c) == pytest.approx(by_words, rel=1e-9)


def test_length_estimate_examples():
    x = FNCoords.untwisted([0.2, 0.3, 0.4])
    assert length_estimate(x, DehnCoords.alpha(3, 0)) == pytest.approx(0.2)
    c = DehnCoords((0, 0, 0), (2, 1, 3))
    assert length_estimate(x, c.scaled(7)) == pytest.approx(7 * length_estimate(x, c))
    y = FNCoords.untwisted([math.exp(-10)] * 3)
    assert length_estimate(y, DehnCoords((2, 0, 0), (0, 0, 0))) == pytest.approx(40.0)


def test_length_ratio_at_e_minus_ten():
    # Stated bracket [0.9, 1.1]; the exact length exceeds the estimate by a
    # constant ~12 log 2 here, so the ratio is ~1.21 (see notes).
    y = FNCoords.untwisted([math.exp(-10)] * 3)
    c = DehnCoords((2, 0, 0), (0, 0, 0))
    ratio = multicurve_length(fn_to_holonomy(TOPO, y), c) / length_estimate(y, c)
    assert 0.9 <= ratio <= 1.1


def test_cube_and_volume():
    box = cube_cx(FNCoords.untwisted([math.exp(-1)] * 3))
    assert box.m_bounds[0] == (0.0, 1.0)
    assert box.t_bounds[0] == pytest.approx((-math.e, math.e))
    box = cube_cx(FNCoords.untwisted([1.0, 1.0, 1.0]))
    assert box.m_bounds[0] == (0.0, 1.0)
    ls = [0.05, 0.2, 0.7]
    assert cube_cx(FNCoords.untwisted(ls)).volume() == pytest.approx(
        math.prod(2 / (l * Log(1 / l)) for l in ls)
    )
    assert vol_bx_estimate(TOPO, FNCoords.untwisted([math.exp(-1)] * 3)) == pytest.approx(math.e**3 / 4)


@given(st.lists(st.floats(1e-4, 0.36), min_size=3, max_size=3), st.integers(0, 2), st.floats(0.1, 0.9))
def test_volume_monotone(ls, i, f):
    x = FNCoords.untwisted(ls)
    smaller = list(ls)
    smaller[i] *= f
    assert vol_bx_estimate(TOPO, FNCoords.untwisted(smaller)) > vol_bx_estimate(TOPO, x)


def test_systole_examples():
    s = systole_estimate(FNCoords.untwisted([0.01, 0.05, 0.02]))
    assert s.value == 0.01 and s.valid
    s = systole_estimate(FNCoords.untwisted([2.0, 2.0, 2.0]))
    assert s.value == 2.0 and not s.valid


@pytest.mark.parametrize("ls", [[0.05, 0.06, 0.07], [0.01, 0.02, 0.03], [0.002, 0.09, 0.03]])
def test_systole_against_word_enumeration(ls):
    x = FNCoords.untwisted(ls)
    best, _ = shortest_word_length(fn_to_holonomy(TOPO, x), 8)
    assert best == pytest.approx(systole_estimate(x).value, rel=1e-6)


def test_fn_text_round_trip():
    x = FNCoords([0.1, 0.2, 0.3], [0.0, -1.5, 2.0])
    assert parse_fn(format_fn(x)) == x
    assert parse_fn("l=1,2,3").twists == (0.0, 0.0, 0.0)
    assert parse_fn("lengths=1,2,3; twists=0,1,0") == FNCoords([1, 2, 3], [0, 1, 0])
