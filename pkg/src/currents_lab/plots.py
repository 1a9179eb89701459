"""Minimal SVG line charts (log or linear axes), written as deterministic text."""
from __future__ import annotations

import csv
import math
from typing import Sequence
from xml.sax.saxutils import escape

from .errors import FormatError

WIDTH, HEIGHT, PAD = 640, 420, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1)]
    step = 10 ** math.floor(math.log10(hi - lo)) if hi > lo else 1.0
    start = math.floor(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step) + 2)]


def line_chart(
    series: dict[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = True,
    logy: bool = True,
) -> str:
    """SVG text for one chart; non-positive values are dropped on log axes."""
    def tx(v, log):
        return math.log10(v) if log else v

    pts = {}
    for name, (xs, ys) in series.items():
        keep = [(tx(x, logx), tx(y, logy)) for x, y in zip(xs, ys)
                if (x > 0 or not logx) and (y > 0 or not logy) and math.isfinite(x) and math.isfinite(y)]
        pts[name] = keep
    allp = [p for v in pts.values() for p in v] or [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return PAD + (v - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def sy(v):
        return HEIGHT - PAD - (v - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{HEIGHT / 2:.1f}" text-anchor="middle" transform="rotate(-90 15 {HEIGHT / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(x0, x1, False) if not logx else range(math.floor(x0), math.ceil(x1) + 1):
        if x0 - 1e-9 <= t <= x1 + 1e-9:
            label = f"1e{int(t)}" if logx else f"{t:g}"
            out.append(f'<text x="{sx(t):.1f}" y="{HEIGHT - PAD + 15}" text-anchor="middle">{label}</text>')
    for t in _ticks(y0, y1, False) if not logy else range(math.floor(y0), math.ceil(y1) + 1):
        if y0 - 1e-9 <= t <= y1 + 1e-9:
            label = f"1e{int(t)}" if logy else f"{t:g}"
            out.append(f'<text x="{PAD - 5}" y="{sy(t) + 4:.1f}" text-anchor="end">{label}</text>')
    for k, (name, p) in enumerate(pts.items()):
        color = COLORS[k % len(COLORS)]
        if p:
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in p)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
            out.extend(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="2.5" fill="{color}"/>' for a, b in p)
        out.append(f'<text x="{PAD + 10}" y="{PAD + 14 * k}" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _read(text: str) -> tuple[str, list[dict]]:
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) < 3 or head[:2] != ["#", "currents-lab"]:
        raise FormatError("not a currents-lab experiment CSV (missing '# currents-lab' header line)")
    return head[2], list(csv.DictReader(lines[1:]))


def plot_csv(text: str) -> str:
    """The chart for an experiment CSV, computed from the CSV text alone."""
    experiment, rows = _read(text)
    if experiment == "properness":
        l1 = [float(r["l1"]) for r in rows]
        return line_chart(
            {"ratio": (l1, [float(r["ratio"]) for r in rows]), "Log(1/s)/s": (l1, [float(r["trend"]) for r in rows])},
            "properness ratio along the schedule",
            "l1",
            "value",
        )
    if experiment == "compactify":
        series: dict = {}
        for r in rows:
            xs, ys = series.setdefault(r["probe"], ([], []))
            xs.append(float(r["n"]))
            ys.append(float(r["normalized"]))
        return line_chart(series, "normalized probe pairings E(i(C,C'))/n", "n", "E/n")
    if experiment == "audit":
        pts = sorted(
            (float(r["central"]), float(r["oracle"]))
            for r in rows
            if r["saturated"] == "true" and float(r["oracle"]) > 0 and float(r["central"]) > 0
        )
        return line_chart(
            {"oracle": ([p[0] for p in pts], [p[1] for p in pts]), "central": ([p[0] for p in pts], [p[0] for p in pts])},
            "oracle value against the central term",
            "central",
            "value",
        )
    raise FormatError(f"no chart for experiment {experiment!r}")
