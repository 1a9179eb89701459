"""Scripted experiments: properness trend, compactification sweep, bound audit.

Each run is a pure function of its :class:`ExperimentConfig`; CSV files,
the SVG plot and ``summary.txt`` are written byte-identically on rerun.
Status codes: ``PASS`` (0), ``FAIL`` (1, a falsification), ``INCONCLUSIVE``
(2, Monte Carlo error too large to decide).
"""
from __future__ import annotations

import csv
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, FormatError
from .holonomy import FNCoords
from .hyperbolic import Log, collar, systole_estimate, vol_bx_estimate
from .intersection import bound_interval, exact_special
from .oracle import exact_intersection
from .plots import plot_csv
from .random_currents import SIMPLEX, SampleModel, mc_expect_ii, mc_expect_length, mc_expect_pairing
from .topology import DehnCoords, build_chain_topology, canonicalize, check_parity

PASS, FAIL, INCONCLUSIVE = 0, 1, 2
STATUS_NAMES = {PASS: "pass", FAIL: "fail", INCONCLUSIVE: "inconclusive"}
SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    experiment: str = "properness"
    genus: int = 2
    seed: int = 0
    samples: int = 20000
    model: str = SIMPLEX
    steps: list = field(default_factory=list)  # schedule parameter per step (l_1 or n)
    base_length: float = 0.1  # lengths of the curves not driven by the schedule
    y_lengths: list = field(default_factory=list)  # basepoint Y (default all 1.0)
    weights: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    pairs: int = 500
    bound: int = 8
    radius: int = 6
    growth: float = 10.0  # properness: required final / initial ratio
    rel_tol: float = 0.10  # compactification: relative error of limit proportions
    zero_frac: float = 0.05  # compactification: final / initial for m' = 0 probes
    workers: int = 1

    def __post_init__(self):
        if not self.steps:
            self.steps = [1e-1, 1e-2, 1e-3, 1e-4] if self.experiment == "properness" else [1, 10, 100, 1000]
        n = 3 * self.genus - 3
        if not self.y_lengths:
            self.y_lengths = [1.0] * n
        if self.experiment == "compactify" and len(self.weights) != n:
            raise DomainError(f"weights need {n} entries")
        if any(w <= 0 for w in self.weights):
            raise DomainError("weights must be positive")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    """Key-value text, one ``key = value`` per line; ``#`` starts a comment; lists are comma separated."""
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    convert = {"int": int, "float": float, "str": str}
    values: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = re.match(r"^([A-Za-z_]\w*)\s*=\s*(.*)$", line)
        if not mt:
            raise FormatError(f"cannot parse config line {raw!r}")
        key, val = mt.group(1).lower(), mt.group(2).strip()
        if key not in kinds:
            raise FormatError(f"unknown config key {key!r}")
        try:
            if kinds[key] == "list":
                values[key] = [float(x) for x in val.split(",") if x.strip()]
            else:
                values[key] = convert[kinds[key]](val)
        except ValueError as exc:
            raise FormatError(f"bad value for {key}: {val!r}") from exc
    return ExperimentConfig(**values)


@dataclass
class ExperimentReport:
    experiment: str
    status: int
    columns: list
    rows: list
    summary: dict
    files: list = field(default_factory=list)

    @property
    def status_name(self) -> str:
        return STATUS_NAMES[self.status]

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# currents-lab {self.experiment} schema v{SCHEMA_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def summary_text(self) -> str:
        items = {"experiment": self.experiment, "status": self.status_name, **self.summary}
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in items.items())


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _write(report: ExperimentReport, cfg: ExperimentConfig, out: str | Path | None) -> ExperimentReport:
    if out is None:
        return report
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    text = report.csv_text()
    files = {
        f"{report.experiment}.csv": text,
        "summary.txt": report.summary_text(),
        "config.txt": cfg.to_text(),
        f"{report.experiment}.svg": plot_csv(text),
    }
    for name, text in files.items():
        (d / name).write_text(text)
        report.files.append(str(d / name))
    return report


# properness -------------------------------------------------------------------


def run_properness(cfg: ExperimentConfig, out: str | Path | None = None) -> ExperimentReport:
    """Ratio ``E(i(C, L_Y))^2 / E(i(C, C'))`` along a shrinking-systole schedule.

    Step ``k`` sets ``l_1 = steps[k]`` and every other length to
    ``base_length`` (twists zero).  Pass needs a strictly increasing ratio,
    every step resolved at 3 SE, and growth by ``cfg.growth`` overall.
    """
    topo = build_chain_topology(cfg.genus)
    n = topo.num_curves
    y = FNCoords.untwisted(cfg.y_lengths)
    rows = []
    for k, s in enumerate(cfg.steps):
        x = FNCoords.untwisted([s] + [cfg.base_length] * (n - 1))
        model = SampleModel(cfg.model, x, cfg.seed)
        ii = mc_expect_ii(model, cfg.samples, cfg.workers)
        ln = mc_expect_length(model, y, cfg.samples, workers=cfg.workers)
        vol = vol_bx_estimate(topo, x)
        ratio = ln.mean**2 / ii.mean
        rel = math.sqrt((2 * ln.stderr / ln.mean) ** 2 + (ii.main.stderr / ii.mean) ** 2)
        rows.append(
            {
                "step": k,
                "l1": s,
                "sys": systole_estimate(x).value,
                "vol_bx": vol,
                "e_len": ln.mean,
                "e_len_se": ln.stderr,
                "e_ii": ii.mean,
                "e_ii_se": ii.main.stderr,
                "e_envelope": ii.envelope.mean,
                "i_sx_ly": vol * ln.mean,
                "i_sx_sx": vol * ii.mean,
                "ratio": ratio,
                "ratio_se": ratio * rel,
                "trend": Log(1 / s) / s,
                "n": cfg.samples,
            }
        )
    r = [row["ratio"] for row in rows]
    se = [row["ratio_se"] for row in rows]
    diffs = [(r[k + 1] - r[k], math.hypot(se[k], se[k + 1])) for k in range(len(r) - 1)]
    increasing = all(d > 0 for d, _ in diffs)
    resolved = all(abs(d) > 3 * e for d, e in diffs)
    growth = r[-1] / r[0]
    if increasing and resolved and growth >= cfg.growth:
        status = PASS
    elif not resolved:
        status = INCONCLUSIVE
    else:
        status = FAIL
    tr = [row["trend"] for row in rows]
    slope = (
        (math.log(r[-1]) - math.log(r[0])) / (math.log(tr[-1]) - math.log(tr[0])) if tr[-1] != tr[0] else float("nan")
    )
    summary = {"growth": growth, "increasing": increasing, "resolved": resolved, "loglog_slope_vs_trend": slope}
    cols = list(rows[0])
    return _write(ExperimentReport("properness", status, cols, rows, summary), cfg, out)


# compactification ---------------------------------------------------------------


def default_probes(genus: int) -> list[tuple[str, DehnCoords]]:
    """Pants curves, plus four fixed transverse multicurves (even ``m`` so parity holds)."""
    n = 3 * genus - 3
    probes = [(f"alpha{i}", DehnCoords.alpha(n, i)) for i in range(n)]
    picks = sorted({0, n // 2, n - 1})
    for i in picks:
        m = [0] * n
        m[i] = 2
        probes.append((f"cross{i}", DehnCoords(tuple(m), (0,) * n)))
    while len(probes) < n + 4:
        k = len(probes) - n
        m = [2] * n
        t = [0] * n
        t[0] = k
        probes.append((f"mixed{k}", DehnCoords(tuple(m), tuple(t))))
    topo = build_chain_topology(genus)
    assert all(check_parity(topo, c) for _, c in probes)
    return probes


def run_compactification(
    cfg: ExperimentConfig, weights: Sequence[float] | None = None, out: str | Path | None = None
) -> ExperimentReport:
    """Sweep ``(l_i, tau_i) = (1/(n a_i), 0)``; pairings with probes, divided by ``n``.

    The limit for a probe ``C'`` is ``sum a_i m'_i / (6g-5)`` (simplex model
    means).  Pass needs every transverse probe within ``rel_tol`` of its
    limit proportion at the last step, and every ``m' = 0`` probe to drop
    below ``zero_frac`` of its first value.
    """
    a = list(weights if weights is not None else cfg.weights)
    topo = build_chain_topology(cfg.genus)
    n_curves = topo.num_curves
    if len(a) != n_curves or any(w <= 0 for w in a):
        raise DomainError(f"need {n_curves} positive weights")
    probes = default_probes(cfg.genus)
    denom = 6 * cfg.genus - 5
    rows = []
    for step in cfg.steps:
        x = FNCoords.untwisted([1.0 / (step * w) for w in a])
        model = SampleModel(cfg.model, x, cfg.seed)
        widths = [2 * collar(min(l, 1.0)).width for l in x.lengths]
        spread = (max(widths) - min(widths)) / (2 * math.log(step)) if step > 1 else float("nan")
        for name, c in probes:
            est = mc_expect_pairing(model, c, cfg.samples, cfg.workers)
            limit = sum(w * m for w, m in zip(a, c.m)) / denom
            rows.append(
                {
                    "n": step,
                    "probe": name,
                    "m": " ".join(map(str, c.m)),
                    "t": " ".join(map(str, c.t)),
                    "e_pairing": est.mean,
                    "se": est.stderr,
                    "normalized": est.mean / step,
                    "normalized_se": est.stderr / step,
                    "limit": limit,
                    "collar_width_min": min(widths),
                    "collar_width_max": max(widths),
                    "collar_spread": spread,
                }
            )
    last = [r for r in rows if r["n"] == cfg.steps[-1]]
    first = {r["probe"]: r for r in rows if r["n"] == cfg.steps[0]}
    worst = 0.0
    undecided = False
    zero_ok = True
    transverse = [r for r in last if r["limit"] > 0]
    tot = sum(r["normalized"] for r in transverse)
    tot_lim = sum(r["limit"] for r in transverse)
    for r in transverse:
        got, want = r["normalized"] / tot, r["limit"] / tot_lim
        err = abs(got - want) / want
        worst = max(worst, err)
        if 3 * r["normalized_se"] / r["normalized"] > cfg.rel_tol:
            undecided = True
    for r in last:
        if r["limit"] == 0:
            f0 = first[r["probe"]]["normalized"]
            zero_ok = zero_ok and (r["normalized"] < cfg.zero_frac * f0)
    if worst <= cfg.rel_tol and zero_ok:
        status = PASS
    elif undecided:
        status = INCONCLUSIVE
    else:
        status = FAIL
    summary = {"weights": " ".join(f"{w:g}" for w in a), "worst_proportion_error": worst, "zero_probes_vanish": zero_ok}
    return _write(ExperimentReport("compactify", status, list(rows[0]), rows, summary), cfg, out)


# bound audit ------------------------------------------------------------------------


def random_pair(rng: np.random.Generator, n: int, bound: int, genus: int = 2) -> DehnCoords:
    """Canonical integer coordinates with entries in ``[-bound, bound]`` and valid parity."""
    topo = build_chain_topology(genus)
    while True:
        m = [int(v) for v in rng.integers(0, bound + 1, n)]
        t = [int(v) for v in rng.integers(-bound, bound + 1, n)]
        c = canonicalize(DehnCoords(tuple(m), tuple(t)))
        if not c.is_zero() and check_parity(topo, c):
            return c


def _audit_one(args):
    genus, c1, c2, radius = args
    topo = build_chain_topology(genus)
    b = bound_interval(topo, c1, c2)
    r = exact_intersection(topo, c1, c2, radius=radius)
    return b, r


def run_bound_audit(cfg: ExperimentConfig, out: str | Path | None = None) -> ExperimentReport:
    """Oracle values against the certified enclosure on random integer pairs."""
    topo = build_chain_topology(cfg.genus)
    n = topo.num_curves
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0xA0D1]))
    pairs = [(random_pair(rng, n, cfg.bound, cfg.genus), random_pair(rng, n, cfg.bound, cfg.genus)) for _ in range(cfg.pairs)]
    jobs = [(cfg.genus, c1, c2, cfg.radius) for c1, c2 in pairs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_audit_one, jobs, chunksize=8))
    else:
        results = [_audit_one(j) for j in jobs]
    rows = []
    for k, ((c1, c2), (b, r)) in enumerate(zip(pairs, results)):
        contained = r.saturated and b.contains(r.value)
        width = b.upper - b.lower
        rows.append(
            {
                "pair": k,
                "m1": " ".join(map(str, c1.m)),
                "t1": " ".join(map(str, c1.t)),
                "m2": " ".join(map(str, c2.m)),
                "t2": " ".join(map(str, c2.t)),
                "lower": b.lower,
                "upper": b.upper,
                "central": b.central,
                "oracle": r.value,
                "saturated": r.saturated,
                "contained": contained,
                "tightness": float((r.value - b.lower) / width) if r.saturated and width else float("nan"),
                "special": exact_special(c1, c2) is not None,
                "attempts": r.attempts,
            }
        )
    sat = [r for r in rows if r["saturated"]]
    violations = [r for r in sat if not r["contained"]]
    if violations:
        status = FAIL
    elif len(sat) < len(rows) / 2:
        status = INCONCLUSIVE
    else:
        status = PASS
    summary = {
        "pairs": len(rows),
        "saturated": len(sat),
        "unsaturated": len(rows) - len(sat),
        "violations": len(violations),
        "containment_rate": (len(sat) - len(violations)) / len(sat) if sat else float("nan"),
        "central_above_oracle": sum(1 for r in sat if r["central"] > r["oracle"]),
        "central_below_oracle": sum(1 for r in sat if r["central"] < r["oracle"]),
        "mean_tightness": float(np.nanmean([r["tightness"] for r in sat])) if sat else float("nan"),
    }
    return _write(ExperimentReport("audit", status, list(rows[0]), rows, summary), cfg, out)


RUNNERS = {"properness": run_properness, "compactify": run_compactification, "audit": run_bound_audit}


def run(cfg: ExperimentConfig, out: str | Path | None = None) -> ExperimentReport:
    try:
        runner = RUNNERS[cfg.experiment]
    except KeyError as exc:
        raise DomainError(f"unknown experiment {cfg.experiment!r}") from exc
    if runner is run_compactification:
        return runner(cfg, out=out)
    return runner(cfg, out)
