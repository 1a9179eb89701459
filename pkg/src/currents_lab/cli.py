"""``currents-lab`` command line."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .errors import CurrentsError
from .experiments import ExperimentConfig, parse_config, run_bound_audit, run_compactification, run_properness
from .holonomy import FNCoords, parse_fn
from .hyperbolic import fn_to_holonomy, length_estimate, multicurve_length
from .intersection import bound_interval, coarse_bound, exact_special
from .oracle import exact_intersection
from .plots import plot_csv
from .random_currents import (
    KINDS,
    SampleModel,
    count_lattice,
    mc_expect_ii,
    mc_expect_length,
    sample_arrays,
)
from .topology import DehnCoords, build_chain_topology, canonicalize, parse_coords, require_parity

EXIT_INPUT = 3  # malformed input; 0/1/2 are reserved for experiment outcomes


def _text(arg: str) -> str:
    p = Path(arg)
    return p.read_text() if p.is_file() else arg


def _coords(arg: str) -> tuple[int, DehnCoords]:
    return parse_coords(_text(arg))


def _fn(arg: str) -> FNCoords:
    return parse_fn(_text(arg))


def _pair(args) -> tuple:
    if len(args.coords) != 2:
        raise CurrentsError("give --coords exactly twice")
    (g1, c1), (g2, c2) = (_coords(a) for a in args.coords)
    if g1 != g2:
        raise CurrentsError("both multicurves must have the same genus")
    topo = build_chain_topology(g1)
    return topo, c1, c2


def cmd_intersect(args) -> int:
    topo, c1, c2 = _pair(args)
    b = bound_interval(topo, c1, c2)
    print(f"{b.central}\t{b.lower}\t{b.upper}")
    if args.verbose:
        coarse = coarse_bound(c1, c2)
        print(f"coarse\t{coarse.lower}\t{coarse.upper}")
        special = exact_special(c1, c2)
        if special is not None:
            print(f"exact\t{special}")
    return 0


def cmd_oracle(args) -> int:
    topo, c1, c2 = _pair(args)
    for c in (c1, c2):
        require_parity(topo, c)
    fn = _fn(args.fn) if args.fn else None
    r = exact_intersection(topo, c1, c2, radius=args.radius, fn=fn)
    print(f"{r.value} saturated:{str(r.saturated).lower()}")
    return 0


def cmd_length(args) -> int:
    g, c = _coords(args.coords)
    topo = build_chain_topology(g)
    x = _fn(args.fn)
    c = canonicalize(c)
    if args.estimate:
        print(repr(length_estimate(x, c)))
    else:
        require_parity(topo, c)
        print(repr(multicurve_length(fn_to_holonomy(topo, x), c)))
    return 0


def _model(args, kind=None) -> SampleModel:
    return SampleModel(kind or args.model, _fn(args.fn), args.seed, getattr(args, "T", None))


def _rows(rows) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["quantity", "mean", "stderr", "n", "seed"])
    for r in rows:
        w.writerow([r[0]] + [f"{v!r}" if isinstance(v, float) else v for v in r[1:]])


def cmd_sample(args) -> int:
    model = _model(args)
    m, t = sample_arrays(model, args.n)
    k = m.shape[1]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow([f"m{i}" for i in range(k)] + [f"t{i}" for i in range(k)])
    for a, b in zip(m, t):
        w.writerow([repr(v.item()) if hasattr(v, "item") else v for v in list(a) + list(b)])
    return 0


def cmd_expect_ii(args) -> int:
    e = mc_expect_ii(_model(args), args.n, args.workers)
    _rows(
        [
            ("ii_main", e.main.mean, e.main.stderr, e.main.count, e.main.seed),
            ("ii_envelope", e.envelope.mean, e.envelope.stderr, e.envelope.count, e.envelope.seed),
        ]
    )
    return 0


def cmd_expect_length(args) -> int:
    model = _model(args)
    y = _fn(args.fn_y) if args.fn_y else model.fn
    e = mc_expect_length(model, y, args.n, mode=args.mode, k=args.k, workers=args.workers)
    _rows([(f"length_{args.mode}", e.mean, e.stderr, e.count, e.seed)])
    return 0


def cmd_count(args) -> int:
    model = _model(args, "lattice")
    c = count_lattice(model, args.T, mode=args.mode)
    _rows([(f"count_{args.mode}", float(c), 0.0, c, args.seed)])
    return 0


def _experiment(runner, name: str, args, **kw) -> int:
    cfg = parse_config(_text(args.config)) if args.config else ExperimentConfig(experiment=name)
    rep = runner(cfg, out=args.out, **kw)
    print(rep.summary_text(), end="")
    for f in rep.files:
        print(f"wrote {f}")
    return rep.status


def cmd_properness(args) -> int:
    return _experiment(run_properness, "properness", args)


def cmd_compactify(args) -> int:
    kw = {}
    if args.weights:
        kw["weights"] = [float(x) for x in args.weights.split(",")]
    return _experiment(run_compactification, "compactify", args, **kw)


def cmd_audit(args) -> int:
    return _experiment(run_bound_audit, "audit", args)


def cmd_plot(args) -> int:
    svg = plot_csv(Path(args.csv).read_text())
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="currents-lab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("intersect", help="certified intersection interval from Dehn coordinates")
    s.add_argument("--coords", action="append", required=True, help="file or inline 'g=2; m=..; t=..' (twice)")
    s.add_argument("--verbose", action="store_true", help="also print the coarse form and any exact value")
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("oracle", help="exact intersection number by geodesic tracing")
    s.add_argument("--coords", action="append", required=True)
    s.add_argument("--radius", type=int, default=6)
    s.add_argument("--fn", help="hyperbolic structure to trace on (default: a generic thick one)")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("length", help="length estimate and exact geodesic length")
    s.add_argument("--coords", required=True)
    s.add_argument("--fn", required=True)
    how = s.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="holonomy trace length (default)")
    how.add_argument("--estimate", action="store_true", help="sum of 2 m Log(1/l) + |t| l")
    s.set_defaults(func=cmd_length)

    def mc(name, func, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--fn", required=True)
        s.add_argument("--model", choices=KINDS, default="simplex")
        s.add_argument("--n", type=int, default=10000)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--workers", type=int, default=1)
        s.set_defaults(func=func)
        return s

    mc("sample", cmd_sample, "draw coordinates from a sampling model").add_argument("--T", type=float)
    mc("expect-ii", cmd_expect_ii, "Monte Carlo mean intersection of random pairs")
    s = mc("expect-length", cmd_expect_length, "Monte Carlo mean length on a second structure")
    s.add_argument("--fn-y")
    s.add_argument("--mode", choices=("estimate", "exact"), default="estimate")
    s.add_argument("--k", type=int, default=1000, help="rounding scale for exact mode")
    s = mc("count", cmd_count, "count lattice points below a length")
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--mode", choices=("estimate", "exact"), default="estimate")

    for name, func in (("properness", cmd_properness), ("compactify", cmd_compactify), ("audit-bounds", cmd_audit)):
        s = sub.add_parser(name, help=f"run the {name} experiment")
        s.add_argument("--config", help="key-value config file")
        s.add_argument("--out", help="output directory")
        if name == "compactify":
            s.add_argument("--weights", help="comma separated positive weights")
        s.set_defaults(func=func)

    s = sub.add_parser("plot", help="regenerate the SVG chart from an experiment CSV")
    s.add_argument("csv")
    s.add_argument("--out", help="SVG path (default: stdout)")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CurrentsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
