"""Benchmark tables, figures and drawings.

The bench path runs a suite of solver configurations over a set of
instances and emits a delimited results table (one row per instance and
configuration), a per-configuration summary with average relative errors,
and matplotlib figures rendered next to the CSVs.  Relative error compares
each configuration's Euclidean tour length against the best one found for
that instance.  Cost columns are deterministic across reruns; wall-time
columns are exempt.

Single solutions can also be drawn as standalone SVG 1.1 documents: sensor
disks and inscribed regions, the closed route polyline, square hitting-point
markers and a filled depot marker.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from cetsp.geometry import region_vertices
from cetsp.instances import Instance
from cetsp.metrics import ObjectiveConfig, RegressionModel, relative_error
from cetsp.solver import SolverConfig, build_regions, config_summary, solve_fragmented
from cetsp.tsp import RouteState

__all__ = [
    "config_suite",
    "bench",
    "write_bench_csv",
    "write_summary_csv",
    "render_svg",
    "solution_dict",
    "solution_json",
    "plot_solution",
    "plot_are",
]


def config_suite(regression: Optional[RegressionModel] = None, quick: bool = False) -> List[Tuple[str, SolverConfig]]:
    """The standard comparison grid: region kind x surrogate x projection.

    Regression entries are skipped unless a fitted model is supplied.
    quick=True keeps only the two plain Manhattan entries.
    """
    suite: List[Tuple[str, SolverConfig]] = []
    for kind in ("square", "hexagon"):
        modes = [("man", "manhattan")] if quick or regression is None else [
            ("man", "manhattan"),
            ("reg", "regression"),
        ]
        projs = [False] if quick else [False, True]
        for tag, mode in modes:
            for proj in projs:
                label = f"{kind}-{tag}" + ("-proj8" if proj else "")
                cfg = SolverConfig(
                    region_kind=kind,
                    objective=ObjectiveConfig(mode=mode, projection8=proj),
                    regression=regression if mode == "regression" else None,
                )
                suite.append((label, cfg))
    return suite


def bench(
    instances: Sequence[Instance], configs: Sequence[Tuple[str, SolverConfig]]
) -> Tuple[List[Dict], List[Dict], Dict[str, Tuple[str, RouteState]]]:
    """Run every config on every instance.

    Returns data rows, per-config summary rows, and the best (label, route)
    per instance for plotting.  Rows are sorted by (instance, config) so the
    cost columns are byte-stable across runs.
    """
    if not instances or not configs:
        raise ValueError("bench needs at least one instance and one config")
    raw: Dict[Tuple[str, str], Tuple[RouteState, float]] = {}
    for inst in instances:
        for label, cfg in configs:
            t0 = time.perf_counter()
            rs = solve_fragmented(inst, cfg)
            raw[(inst.name, label)] = (rs, time.perf_counter() - t0)

    rows: List[Dict] = []
    best_of: Dict[str, Tuple[str, RouteState]] = {}
    for inst in instances:
        best_eu = min(raw[(inst.name, label)][0].euclidean_cost for label, _ in configs)
        for label, _ in configs:
            rs, secs = raw[(inst.name, label)]
            is_best = rs.euclidean_cost <= best_eu
            if is_best and inst.name not in best_of:
                best_of[inst.name] = (label, rs)
            rows.append(
                {
                    "instance": inst.name,
                    "config": label,
                    "manhattan": rs.manhattan_cost,
                    "euclidean": rs.euclidean_cost,
                    "time_s": secs,
                    "best": int(is_best),
                    "rel_err": relative_error(rs.euclidean_cost, best_eu),
                }
            )
    rows.sort(key=lambda r: (r["instance"], r["config"]))
    summary: List[Dict] = []
    for label, _ in configs:
        mine = [r for r in rows if r["config"] == label]
        summary.append(
            {
                "config": label,
                "n_best": sum(r["best"] for r in mine),
                "are": sum(r["rel_err"] for r in mine) / len(mine),
            }
        )
    return rows, summary, best_of


def write_bench_csv(rows: Sequence[Dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["instance", "config", "manhattan", "euclidean", "time_s", "best", "rel_err"])
        for r in rows:
            w.writerow(
                [
                    r["instance"],
                    r["config"],
                    f"{r['manhattan']:.6f}",
                    f"{r['euclidean']:.6f}",
                    f"{r['time_s']:.3f}",
                    r["best"],
                    f"{r['rel_err']:.6f}",
                ]
            )


def write_summary_csv(summary: Sequence[Dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["config", "n_best", "are"])
        for r in summary:
            w.writerow([r["config"], r["n_best"], f"{r['are']:.6f}"])


# ---------------------------------------------------------------------------
# solution serialization

def solution_dict(inst: Instance, cfg: SolverConfig, rs: RouteState) -> Dict:
    return {
        "instance": inst.name,
        "config": config_summary(cfg),
        "route": list(rs.order),
        "hitting_points": [[x, y] for x, y in rs.hitting_points],
        "manhattan_cost": rs.manhattan_cost,
        "euclidean_cost": rs.euclidean_cost,
        "time_ms": rs.time_ms,
        "iterations": rs.iterations,
    }


def solution_json(inst: Instance, cfg: SolverConfig, rs: RouteState) -> str:
    return json.dumps(solution_dict(inst, cfg, rs), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# drawing

def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(inst: Instance, rs: RouteState, region_kind: str = "square") -> str:
    """Standalone SVG 1.1 text for one solution.

    Elements: one circle outline per positive-radius disk, one polygon per
    inscribed region, one closed route polyline, one small rect per hitting
    point and a filled circle marking the depot."""
    xs: List[float] = []
    ys: List[float] = []
    for s in inst.sensors:
        xs.extend([s.x - s.r, s.x + s.r])
        ys.extend([s.y - s.r, s.y + s.r])
    for x, y in rs.hitting_points:
        xs.append(x)
        ys.append(y)
    w = max(xs) - min(xs)
    h = max(ys) - min(ys)
    margin = 0.05 * max(w, h, 1.0)
    x0, y0 = min(xs) - margin, min(ys) - margin
    vw, vh = w + 2 * margin, h + 2 * margin
    mk = 0.008 * max(vw, vh)
    sw = _fmt(0.003 * max(vw, vh))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(vw)} {_fmt(vh)}">',
    ]
    regions = build_regions(inst, region_kind)
    for s in inst.sensors:
        if s.r > 0:
            out.append(
                f'<circle cx="{_fmt(s.x)}" cy="{_fmt(s.y)}" r="{_fmt(s.r)}" '
                f'fill="none" stroke="#999999" stroke-width="{sw}"/>'
            )
    for s in inst.sensors:
        if s.r > 0:
            pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in region_vertices(regions[s.id]))
            out.append(
                f'<polygon points="{pts}" fill="none" stroke="#4477aa" stroke-width="{sw}"/>'
            )
    route_pts = [rs.hitting_points[i] for i in rs.order] + [rs.hitting_points[rs.order[0]]]
    poly = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in route_pts)
    out.append(f'<polyline points="{poly}" fill="none" stroke="#cc3311" stroke-width="{sw}"/>')
    for i in rs.order[1:]:
        px, py = rs.hitting_points[i]
        out.append(
            f'<rect x="{_fmt(px - mk)}" y="{_fmt(py - mk)}" width="{_fmt(2 * mk)}" '
            f'height="{_fmt(2 * mk)}" fill="#cc3311"/>'
        )
    dx, dy = rs.hitting_points[rs.order[0]]
    out.append(f'<circle cx="{_fmt(dx)}" cy="{_fmt(dy)}" r="{_fmt(1.5 * mk)}" fill="#000000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_solution(inst: Instance, rs: RouteState, region_kind: str, path: str | Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 7))
    regions = build_regions(inst, region_kind)
    for s in inst.sensors:
        if s.r > 0:
            ax.add_patch(plt.Circle((s.x, s.y), s.r, fill=False, color="0.7", lw=0.8))
            verts = list(region_vertices(regions[s.id]))
            ax.add_patch(plt.Polygon(verts, fill=False, color="tab:blue", lw=0.8))
        ax.annotate(str(s.id), (s.x, s.y), fontsize=7, ha="center", va="center", color="0.4")
    route = [rs.hitting_points[i] for i in rs.order] + [rs.hitting_points[rs.order[0]]]
    ax.plot([p[0] for p in route], [p[1] for p in route], "-o", color="tab:red", ms=3, lw=1.2)
    ax.plot(*rs.hitting_points[rs.order[0]], "ks", ms=7)
    ax.set_aspect("equal")
    ax.set_title(title or f"{inst.name}: euclidean {rs.euclidean_cost:.1f}")
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def plot_are(summary: Sequence[Dict], path: str | Path) -> None:
    labels = [r["config"] for r in summary]
    ares = [100.0 * r["are"] for r in summary]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(labels, ares, color="tab:blue")
    ax.set_ylabel("average relative error vs best (%)")
    ax.set_xlabel("configuration")
    ax.tick_params(axis="x", rotation=30)
    for i, v in enumerate(ares):
        ax.annotate(f"{v:.1f}", (i, v), ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
