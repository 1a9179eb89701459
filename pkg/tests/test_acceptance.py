"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``CRITERION <id> PASS|FAIL`` line (visible with
``pytest -v``, or run this file directly) before asserting.
"""
import math
import time

import numpy as np
import pytest

from currents_lab.experiments import (
    PASS,
    ExperimentConfig,
    random_pair,
    run_bound_audit,
    run_compactification,
    run_properness,
)
from currents_lab.holonomy import FNCoords
from currents_lab.hyperbolic import (
    RELATOR_TOL,
    Log,
    fn_to_holonomy,
    length_estimate,
    multicurve_length,
    vol_bx_estimate,
)
from currents_lab.intersection import bound_interval, exact_special
from currents_lab.oracle import exact_intersection
from currents_lab.random_currents import (
    LATTICE_BUDGET,
    SampleModel,
    count_lattice,
    mc_expect_ii,
    mc_expect_length,
    predicted_lattice_count,
    sample_arrays,
)
from currents_lab.topology import DehnCoords, build_chain_topology, twist_action

TOPO = build_chain_topology(2)


def report(capsys, cid: str, ok: bool, detail: str) -> None:
    line = f"CRITERION {cid:>3} {'PASS' if ok else 'FAIL'}: {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


@pytest.mark.slow
def test_criterion_01_bound_containment(capsys):
    t0 = time.time()
    rep = run_bound_audit(ExperimentConfig(experiment="audit", pairs=500, bound=8, seed=2024))
    elapsed = time.time() - t0
    s = rep.summary
    ok = s["pairs"] >= 500 and s["violations"] == 0 and s["saturated"] > 0 and elapsed <= 600
    report(
        capsys,
        "1",
        ok,
        f"{s['saturated']}/{s['pairs']} saturated, {s['violations']} violations, "
        f"{s['unsaturated']} unsaturated, {elapsed:.0f}s",
    )


@pytest.mark.slow
def test_criterion_02_alpha_supported_exactness(capsys):
    rng = np.random.default_rng(np.random.SeedSequence([2, 1000]))
    bad = []
    for _ in range(1000):
        c = random_pair(rng, 3, 8)
        tt = tuple(int(x) for x in rng.integers(0, 9, 3))
        if not any(tt):
            tt = (1, 0, 0)
        c2 = DehnCoords((0, 0, 0), tt)
        want = sum(a * b for a, b in zip(tt, c.m))
        b = bound_interval(TOPO, c, c2)
        r = exact_intersection(TOPO, c, c2)
        got = (exact_special(c, c2), b.lower, b.upper, r.value if r.saturated else None)
        if got != (want,) * 4:
            bad.append((c, c2, want, got))
    report(capsys, "2", not bad, f"{1000 - len(bad)}/1000 exact (special, lower, upper, oracle)")


@pytest.mark.slow
def test_criterion_03_twist_equivariance(capsys):
    rng = np.random.default_rng(np.random.SeedSequence([3, 1000]))
    bad = []
    for _ in range(1000):
        c, c2 = random_pair(rng, 3, 6), random_pair(rng, 3, 6)
        i, n = int(rng.integers(0, 3)), int(rng.integers(-3, 4))
        d, d2 = twist_action(c, i, n), twist_action(c2, i, n)
        same_bounds = bound_interval(TOPO, c, c2) == bound_interval(TOPO, d, d2)
        r, s = exact_intersection(TOPO, c, c2), exact_intersection(TOPO, d, d2)
        if not (same_bounds and r.saturated and s.saturated and r.value == s.value):
            bad.append((c, c2, i, n, r.value, s.value))
    report(capsys, "3", not bad, f"{1000 - len(bad)}/1000 invariant")


def test_criterion_04_homogeneity(capsys):
    x = FNCoords.untwisted([0.1, 0.2, 0.3])
    t0 = time.time()
    e = mc_expect_length(SampleModel("simplex", x, 4), x, 100_000)
    elapsed = time.time() - t0
    target = 6 / 7
    ok = abs(e.mean - target) <= 3 * e.stderr and elapsed <= 60
    report(capsys, "4", ok, f"E = {e.mean:.5f} +- {e.stderr:.5f} vs 6/7 = {target:.5f}, {elapsed:.1f}s")


def test_criterion_05_simplex_moments(capsys):
    x = FNCoords.untwisted([0.01, 0.2, 0.7])
    m, t = sample_arrays(SampleModel("simplex", x, 5), 100_000)
    worst = 0.0
    for i, ell in enumerate(x.lengths):
        for vals, a in ((m[:, i], 1 / (2 * Log(1 / ell))), (np.abs(t[:, i]), 1 / ell)):
            se = vals.std(ddof=1) / math.sqrt(len(vals))
            worst = max(worst, abs(vals.mean() - a / 7) / se)
    report(capsys, "5", worst <= 3, f"max deviation {worst:.2f} SE over 6 coordinates")


def test_criterion_06_length_estimate_convergence(capsys):
    widths = []
    for s in (1e-2, 1e-3, 1e-4):
        x = FNCoords.untwisted([s, s, s])
        rep = fn_to_holonomy(TOPO, x)
        rng = np.random.default_rng(np.random.SeedSequence([6, 100]))
        ratios = []
        for _ in range(100):
            c = random_pair(rng, 3, 4)
            ratios.append(multicurve_length(rep, c) / length_estimate(x, c))
        widths.append(max(max(ratios), 1 / min(ratios)))
    ok = widths[0] <= 2 and all(b < a for a, b in zip(widths, widths[1:]))
    report(capsys, "6", ok, "bracket K at max l = 1e-2, 1e-3, 1e-4: " + ", ".join(f"{k:.3f}" for k in widths))


def test_criterion_07_expectation_scaling(capsys):
    y = FNCoords.untwisted([1.0, 1.0, 1.0])
    ii, ln = [], []
    for s in (1e-2, 1e-3, 1e-4):
        model = SampleModel("cube", FNCoords.untwisted([s, 0.1, 0.1]), 7)
        ii.append(mc_expect_ii(model, 100_000).mean * s * Log(1 / s))
        ln.append(mc_expect_length(model, y, 100_000).mean * s)
    fi, fl = max(ii) / min(ii), max(ln) / min(ln)
    report(
        capsys,
        "7",
        fi <= 5 and fl <= 5,
        "i x s Log(1/s): " + ", ".join(f"{v:.3f}" for v in ii) + f" (spread {fi:.2f}); "
        "l x s: " + ", ".join(f"{v:.3f}" for v in ln) + f" (spread {fl:.2f})",
    )


def test_criterion_08_properness(capsys):
    rep = run_properness(ExperimentConfig(samples=100_000, seed=8))
    g = rep.summary["growth"]
    report(capsys, "8", rep.status == PASS and g >= 10, f"ratio growth x{g:.0f}, status {rep.status_name}")


def test_criterion_09_compactification(capsys):
    rep = run_compactification(ExperimentConfig(experiment="compactify", samples=100_000, seed=9), [1, 2, 3])
    last = {r["probe"]: r["normalized"] for r in rep.rows if r["n"] == 1000}
    first = {r["probe"]: r["normalized"] for r in rep.rows if r["n"] == 1}
    props = [last[f"cross{i}"] / last["cross0"] for i in range(3)]
    props_ok = all(abs(p - k) / k <= 0.10 for p, k in zip(props, (1, 2, 3)))
    zero = last["alpha0"] / first["alpha0"]
    ok = props_ok and zero < 0.05 and rep.status == PASS
    report(
        capsys,
        "9",
        ok,
        "proportions " + ":".join(f"{p:.3f}" for p in props) + f", m'=0 probe final/initial {zero:.2e}",
    )


def _largest_T(x: FNCoords) -> float:
    # predicted count is c T^6; largest T whose enumeration fits the budget
    c = predicted_lattice_count(TOPO, x, 1.0)
    return (LATTICE_BUDGET / c) ** (1 / 6) * (1 - 1e-9)


def test_criterion_10a_lattice_volume(capsys):
    x = FNCoords.untwisted([1.0, 1.0, 1.0])
    T = _largest_T(x)
    count = count_lattice(SampleModel("lattice", x, 0, T))
    ratio = (count / T**6) / vol_bx_estimate(TOPO, x)
    ok = 1 / 4 <= ratio <= 4
    report(capsys, "10a", ok, f"T = {T:.2f}, count = {count}, (count/T^6) / vol_bx_estimate = {ratio:.4g}")


def test_criterion_10b_lattice_growth(capsys):
    x = FNCoords.untwisted([1.0, 1.0, 1.0])
    T = _largest_T(x) / 2
    c1 = count_lattice(SampleModel("lattice", x, 0, T))
    c2 = count_lattice(SampleModel("lattice", x, 0, 2 * T))
    q = c2 / c1
    ok = c1 >= 10**4 and 64 / 1.5 <= q <= 64 * 1.5
    report(capsys, "10b", ok, f"T = {T:.2f}: count(T) = {c1}, count(2T) = {c2}, ratio {q:.2f}")


def test_criterion_11_infrastructure(capsys, tmp_path):
    grid = np.geomspace(0.01, 5.0, 10)
    worst = 0.0
    k = 0
    for a in grid:
        for b in grid:
            for c in grid:
                tw = [0.37 * a * math.sin(k), -0.21 * b * math.cos(k), 0.5 * c * math.sin(2 * k)]
                rep = fn_to_holonomy(TOPO, FNCoords([a, b, c], tw))
                worst = max(worst, rep.relator_residual())
                k += 1
    same = True
    for name, run in (
        ("properness", lambda out: run_properness(ExperimentConfig(samples=20_000, seed=11), out)),
        ("compactify", lambda out: run_compactification(ExperimentConfig(experiment="compactify", samples=20_000, seed=11), out=out)),
    ):
        run(tmp_path / f"{name}1")
        run(tmp_path / f"{name}2")
        for f in sorted((tmp_path / f"{name}1").iterdir()):
            same &= f.read_bytes() == (tmp_path / f"{name}2" / f.name).read_bytes()
    model = SampleModel("simplex", FNCoords.untwisted([0.1, 0.2, 0.3]), 11)
    same &= mc_expect_ii(model, 50_000, workers=1) == mc_expect_ii(model, 50_000, workers=4)
    ok = worst < RELATOR_TOL and same
    report(capsys, "11", ok, f"max relator residual {worst:.2e} over {k} FN points; reruns byte-identical: {same}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
