import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from currents_lab.topology import DehnCoords, build_chain_topology, canonicalize, check_parity

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def coords(draw, genus=2, bound=8, min_m=0):
    """Canonical integer coordinates with valid parity."""
    topo = build_chain_topology(genus)
    n = topo.num_curves
    m = draw(st.lists(st.integers(min_m, bound), min_size=n, max_size=n))
    t = draw(st.lists(st.integers(-bound, bound), min_size=n, max_size=n))
    # fix parity by bumping the first curve of each failing pants
    for i, j, k in topo.pants_boundaries:
        if (m[i] + m[j] + m[k]) % 2:
            m[i] = m[i] + 1 if m[i] < bound else m[i] - 1
    c = canonicalize(DehnCoords(tuple(m), tuple(t)))
    if not check_parity(topo, c):
        from hypothesis import assume

        assume(False)
    return c


@pytest.fixture(scope="session")
def g2():
    return build_chain_topology(2)
