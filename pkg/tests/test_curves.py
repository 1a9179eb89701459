import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currents_lab.curves import PAIR, SELF, arc_system, assemble, check_path, component_multiset, decompose
from currents_lab.errors import ParityError
from currents_lab.hyperbolic import fn_to_holonomy
from currents_lab.holonomy import FNCoords
from currents_lab.topology import DehnCoords, build_chain_topology, canonicalize, twist_action
from currents_lab.words import CurveWord, cyclic_reduce, marking, same_cyclic_word, to_word

from .conftest import coords


def test_arc_system_examples():
    a = arc_system((2, 1, 1))
    assert a.endpoint_counts() == (2, 1, 1)
    assert len(a.arcs) == 2 and all(x.kind == PAIR for x in a.arcs)
    b = arc_system((4, 1, 1))
    assert b.endpoint_counts() == (4, 1, 1)
    selfs = [x for x in b.arcs if x.kind == SELF]
    assert len(selfs) == 1
    # the self arc leaves and returns to a_0 and crosses the hexagon boundary twice
    assert {s for s, _ in selfs[0].ends} == {0}
    assert len(selfs[0].crossings) == 2
    assert arc_system((0, 0, 0)).arcs == ()
    with pytest.raises(ParityError):
        arc_system((1, 0, 0))


@given(st.tuples(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30)))
def test_arc_system_counts(m):
    if sum(m) % 2:
        with pytest.raises(ParityError):
            arc_system(m)
        return
    a = arc_system(m)
    assert a.endpoint_counts() == m
    tri = all(m[k] <= m[(k + 1) % 3] + m[(k + 2) % 3] for k in range(3))
    if tri:
        assert all(x.kind == PAIR for x in a.arcs)
    # endpoint slots on each edge are used exactly once
    for p in range(3):
        used = sorted(j for arc in a.arcs for s, j in arc.ends if s == p)
        assert used == list(range(m[p]))


def test_assemble_pants_curves(g2):
    sc = assemble(g2, DehnCoords((0, 0, 0), (1, 0, 0)))
    assert decompose(sc) == [(DehnCoords((0, 0, 0), (1, 0, 0)), 1)]
    sc = assemble(g2, DehnCoords((0, 0, 0), (3, 0, 0)))
    assert decompose(sc) == [(DehnCoords((0, 0, 0), (1, 0, 0)), 3)]
    parts = decompose(assemble(g2, DehnCoords((0, 0, 0), (2, 5, 0))))
    assert component_multiset(parts) == component_multiset(
        [(DehnCoords.alpha(3, 0), 2), (DehnCoords.alpha(3, 1), 5)]
    )


def test_assemble_parity_error(g2):
    with pytest.raises(ParityError):
        assemble(g2, DehnCoords((1, 0, 0), (0, 0, 0)))


def test_assemble_two_two_zero(g2):
    c = DehnCoords((2, 2, 0), (0, 0, 0))
    sc = assemble(g2, c)
    assert sc.total() == c
    assert all(check_path(g2, comp) for comp in sc.components)


@settings(max_examples=300)
@given(coords(bound=20))
def test_round_trip_and_crossings(c):
    topo = build_chain_topology(2)
    sc = assemble(topo, c)
    assert sc.total() == c
    for i in range(3):
        assert sc.crossings(i) == c.m[i]
    again = assemble(topo, canonicalize(sc.total()))
    assert component_multiset(decompose(again)) == component_multiset(decompose(sc))
    assert all(check_path(topo, comp) for comp in sc.components)


@settings(max_examples=100)
@given(coords(bound=10), st.integers(0, 2), st.integers(-4, 4))
def test_twist_naturality(c, i, n):
    topo = build_chain_topology(2)
    lhs = component_multiset(decompose(assemble(topo, twist_action(c, i, n))))
    rhs = component_multiset([(twist_action(d, i, n), k) for d, k in decompose(assemble(topo, c))])
    assert lhs == rhs


@given(coords(genus=3, bound=6))
def test_round_trip_genus_three(c):
    topo = build_chain_topology(3)
    assert assemble(topo, c).total() == c


def test_marking_shape(g2):
    mk = marking(g2)
    assert mk.rank == 4
    assert len(mk.relator) == 8
    assert mk.relator == ((2, 1), (0, 1), (3, -1), (1, 1), (0, -1), (3, 1), (2, -1), (1, -1))
    for g in (3, 4):
        mk = marking(build_chain_topology(g))
        assert mk.rank == 2 * g and len(mk.relator) == 4 * g


def test_alpha_words_golden(g2):
    words = []
    for i in range(3):
        (comp,) = assemble(g2, DehnCoords.alpha(3, i)).components
        words.append(to_word(g2, comp).text())
    assert words == ["x2 X3", "X0 x3 X2", "x1 x2 X3 x0 X1 x3 X2"]


def _word(topo, c):
    (comp,) = assemble(topo, c).components
    return to_word(topo, comp)


def test_inverse_word(g2):
    w = _word(g2, DehnCoords((2, 1, 1), (3, 0, -1)))
    inv = w.inverse()
    assert list(inv.letters) == cyclic_reduce(inv.letters)
    rep = fn_to_holonomy(g2, FNCoords.untwisted([0.7, 0.8, 0.9]))
    from currents_lab.hyperbolic import exact_length

    assert exact_length(rep, w) == pytest.approx(exact_length(rep, inv), rel=1e-12)


@settings(max_examples=60)
@given(coords(bound=6))
def test_words_cyclically_reduced_and_hyperbolic(c):
    topo = build_chain_topology(2)
    rep = fn_to_holonomy(topo, FNCoords([0.9, 1.1, 1.3], [0.2, -0.1, 0.3]))
    for comp in assemble(topo, c).components:
        w = to_word(topo, comp)
        assert list(w.letters) == cyclic_reduce(w.letters)
        assert abs(rep.curve_trace(w)) > 2


def test_twisted_word_trace(g2):
    # tw_{alpha_0} changes the length exactly like a full FN twist about alpha_0
    from currents_lab.hyperbolic import exact_length

    c = DehnCoords((2, 1, 1), (1, 0, 0))
    x = FNCoords.untwisted([0.5, 0.6, 0.7])
    shifted = FNCoords([0.5, 0.6, 0.7], [0.5, 0.0, 0.0])
    a = exact_length(fn_to_holonomy(g2, x), _word(g2, twist_action(c, 0, 1)))
    b = exact_length(fn_to_holonomy(g2, shifted), _word(g2, c))
    assert a == pytest.approx(b, rel=1e-9)


def test_dump_is_stable(g2):
    sc = assemble(g2, DehnCoords((2, 1, 1), (3, 0, -1)))
    assert sc.dump() == assemble(g2, DehnCoords((2, 1, 1), (3, 0, -1))).dump()
    assert all(line.startswith("component:") for line in sc.dump().splitlines())
