import pytest

from currents_lab.errors import DomainError, FormatError
from currents_lab.experiments import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    ExperimentConfig,
    default_probes,
    parse_config,
    run_bound_audit,
    run_compactification,
    run_properness,
)

PROPERNESS_HEADER = (
    "step,l1,sys,vol_bx,e_len,e_len_se,e_ii,e_ii_se,e_envelope,i_sx_ly,i_sx_sx,ratio,ratio_se,trend,n"
)
COMPACTIFY_HEADER = (
    "n,probe,m,t,e_pairing,se,normalized,normalized_se,limit,collar_width_min,collar_width_max,collar_spread"
)
AUDIT_HEADER = "pair,m1,t1,m2,t2,lower,upper,central,oracle,saturated,contained,tightness,special,attempts"


def test_config_round_trip():
    cfg = parse_config("experiment = compactify\nseed = 7 # comment\nweights = 1, 2, 3\nsamples=500\n")
    assert cfg.seed == 7 and cfg.weights == [1.0, 2.0, 3.0] and cfg.steps == [1, 10, 100, 1000]
    assert parse_config(cfg.to_text()) == cfg
    with pytest.raises(FormatError):
        parse_config("nonsense = 3")
    with pytest.raises(FormatError):
        parse_config("seed = x")
    with pytest.raises(DomainError):
        parse_config("experiment = compactify\nweights = 1, 2")


def test_properness(tmp_path):
    cfg = ExperimentConfig(samples=20000, seed=1)
    rep = run_properness(cfg, tmp_path / "a")
    assert rep.status == PASS
    text = (tmp_path / "a" / "properness.csv").read_text()
    assert text.splitlines()[0] == "# currents-lab properness schema v1"
    assert text.splitlines()[1] == PROPERNESS_HEADER
    assert len(text.splitlines()) == 2 + 4
    run_properness(cfg, tmp_path / "b")
    for name in ("properness.csv", "summary.txt", "config.txt", "properness.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_properness_constant_schedule():
    rep = run_properness(ExperimentConfig(samples=5000, steps=[0.1, 0.1, 0.1]))
    assert rep.status == INCONCLUSIVE


def test_properness_y_dependence():
    a = run_properness(ExperimentConfig(samples=5000))
    b = run_properness(ExperimentConfig(samples=5000, y_lengths=[0.5, 2.0, 1.0]))
    ratios = [x["ratio"] / y["ratio"] for x, y in zip(a.rows, b.rows)]
    assert max(ratios) / min(ratios) < 10


def test_compactification(tmp_path):
    cfg = ExperimentConfig(experiment="compactify", samples=20000)
    rep = run_compactification(cfg, out=tmp_path)
    assert rep.status == PASS
    lines = (tmp_path / "compactify.csv").read_text().splitlines()
    assert lines[1] == COMPACTIFY_HEADER
    last = {r["probe"]: r for r in rep.rows if r["n"] == 1000}
    assert last["cross2"]["normalized"] / last["cross0"]["normalized"] == pytest.approx(3, rel=0.1)


def test_compactification_equal_weights():
    cfg = ExperimentConfig(experiment="compactify", samples=20000, weights=[1.0, 1.0, 1.0])
    rep = run_compactification(cfg)
    last = [r["normalized"] for r in rep.rows if r["n"] == 1000 and r["probe"].startswith("cross")]
    assert max(last) / min(last) == pytest.approx(1, abs=0.05)


def test_default_probes():
    names = [n for n, _ in default_probes(2)]
    assert names[:3] == ["alpha0", "alpha1", "alpha2"] and len(names) == 7
    assert len(default_probes(3)) == 6 + 4


def test_bound_audit_small(tmp_path):
    cfg = ExperimentConfig(experiment="audit", pairs=12, bound=5, seed=3)
    rep = run_bound_audit(cfg, tmp_path)
    assert rep.status == PASS
    lines = (tmp_path / "audit.csv").read_text().splitlines()
    assert lines[1] == AUDIT_HEADER and len(lines) == 2 + 12
    assert rep.summary["violations"] == 0


def test_plot_is_a_function_of_the_csv(tmp_path):
    from currents_lab.plots import plot_csv

    run_properness(ExperimentConfig(samples=3000, seed=2), tmp_path)
    assert plot_csv((tmp_path / "properness.csv").read_text()) == (tmp_path / "properness.svg").read_text()
    with pytest.raises(FormatError):
        plot_csv("a,b\n1,2\n")
