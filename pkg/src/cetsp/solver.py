"""Fragmented relocation solver.

Rather than optimizing the whole tour at once, the search alternates two
cheap phases until the surrogate cost stops improving:

1. ordering: a TSP pass (exact DP up to 16 nodes, NN + 2-opt above) over
   Euclidean distances between the current hitting points;
2. relocation: with the order held fixed, every node's hitting point is
   re-placed inside its convex region, one node at a time, by three local
   operators: the exact two-leg minimizer against the 1-hop neighbors, the
   same against the 2-hop neighbors (kept only if the node's real legs do
   not get worse), and a pull toward the foot of the perpendicular on the
   neighbor chord (kept only if not worse).

Overlapping disks are first merged into super nodes: every maximal
subgroup whose regions actually intersect shares one point (the in-common
point with minimum total Manhattan distance to the member centers), so one
visit covers the whole subgroup until relocation teases the points apart.

All acceptance gates compare the configured surrogate cost, so the
per-sweep cost sequence is monotone non-increasing.  The legacy upper
sentinel of 1,200,000 on the incoming cost is kept; a costlier start just
replaces it with +inf.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from cetsp.geometry import (
    ConvexRegion,
    Point,
    clip_toward,
    contains,
    disk_overlap_groups,
    foot_of_perpendicular,
    inscribe,
)
from cetsp.instances import Instance
from cetsp.metrics import ObjectiveConfig, RegressionModel, edge_cost, euclidean, manhattan
from cetsp.simplex import INF, LpProblem, add_abs_gadget, solve_lp, solve_lp_centered
from cetsp.tsp import HELD_KARP_MAX, RouteState, held_karp, nn_two_opt, positions_of

#: legacy sentinel for the incoming cost of the relocation loop
COST_SENTINEL = 1_200_000.0


@dataclass(frozen=True)
class SolverConfig:
    region_kind: str = "square"
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    regression: Optional[RegressionModel] = None
    max_outer_iters: int = 50
    improvement_tol: float = 1e-6

    def __post_init__(self):
        if self.region_kind not in ("square", "hexagon"):
            raise ValueError(f"unknown region kind {self.region_kind!r}")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if self.improvement_tol <= 0:
            raise ValueError("improvement_tol must be positive")
        if self.objective.mode == "regression":
            if self.regression is None:
                raise ValueError("regression objective needs a fitted model")
            if self.regression.c_dx <= 0 or self.regression.c_dy <= 0:
                raise ValueError("regression relocation assumes positive coefficients")


def build_regions(inst: Instance, kind: str) -> List[ConvexRegion]:
    return [inscribe(kind, s.center, s.r) for s in inst.sensors]


def _leg_cost(p: Point, q: Point, cfg: SolverConfig) -> float:
    return edge_cost(p, q, cfg.objective, cfg.regression)


def route_surrogate_cost(order: Sequence[int], points: Sequence[Point], cfg: SolverConfig) -> float:
    total = 0.0
    for k in range(len(order)):
        total += _leg_cost(points[order[k]], points[order[(k + 1) % len(order)]], cfg)
    return total


# ---------------------------------------------------------------------------
# super nodes

def _intersection_lp(ids: Sequence[int], regions: Sequence[ConvexRegion]) -> Optional[LpProblem]:
    """LP over (cx, cy) constrained to the intersection; None if the box
    part is already empty."""
    xlo = max(regions[i].x_bounds[0] for i in ids)
    xhi = min(regions[i].x_bounds[1] for i in ids)
    ylo = max(regions[i].y_bounds[0] for i in ids)
    yhi = min(regions[i].y_bounds[1] for i in ids)
    if xlo > xhi or ylo > yhi:
        return None
    p = LpProblem()
    cx = p.add_var(xlo, xhi)
    cy = p.add_var(ylo, yhi)
    for i in ids:
        for hp in regions[i].half_planes:
            sense = "<=" if hp.sense == "le" else ">="
            p.add_constraint({cx: -hp.slope, cy: 1.0}, sense, hp.intercept)
    return p


def _regions_intersect(ids: Sequence[int], regions: Sequence[ConvexRegion]) -> bool:
    p = _intersection_lp(ids, regions)
    if p is None:
        return False
    if all(not regions[i].half_planes for i in ids):
        return True  # boxes: the bound check was the whole story
    return solve_lp(p).status == "optimal"


def _shared_point(ids: Sequence[int], regions: Sequence[ConvexRegion], inst: Instance) -> Point:
    p = _intersection_lp(ids, regions)
    assert p is not None
    for i in ids:
        add_abs_gadget(p, {0: 1.0}, const=-inst.sensors[i].x)
        add_abs_gadget(p, {1: 1.0}, const=-inst.sensors[i].y)
    sol, centered = solve_lp_centered(p, [0, 1])
    if sol.status != "optimal":  # pragma: no cover - guarded by _regions_intersect
        raise RuntimeError("shared-point subproblem infeasible")
    return (centered[0], centered[1])


def super_nodes(inst: Instance, regions: Sequence[ConvexRegion]) -> List[Point]:
    """Initial hitting points: disk-overlap groups are split into maximal
    subgroups with a nonempty region intersection; each subgroup shares the
    intersection point closest (total Manhattan) to the member centers.
    Everyone else starts at its center."""
    points: List[Point] = [s.center for s in inst.sensors]
    for group in disk_overlap_groups(inst).groups:
        remaining = list(group)
        while len(remaining) >= 2:
            best_pair = None
            best_depth = -INF
            for a, b in combinations(remaining, 2):
                sa, sb = inst.sensors[a], inst.sensors[b]
                depth = sa.r + sb.r - math.hypot(sa.x - sb.x, sa.y - sb.y)
                if depth > best_depth and _regions_intersect((a, b), regions):
                    best_pair, best_depth = (a, b), depth
            if best_pair is None:
                break
            sub = list(best_pair)
            for k in remaining:
                if k not in sub and _regions_intersect(sub + [k], regions):
                    sub.append(k)
            shared = _shared_point(sub, regions, inst)
            for i in sub:
                points[i] = shared
            remaining = [i for i in remaining if i not in sub]
    return points


# ---------------------------------------------------------------------------
# relocation operators

def relocate_between(
    prev_pt: Point,
    next_pt: Point,
    region: ConvexRegion,
    cfg: ObjectiveConfig,
    model: Optional[RegressionModel] = None,
) -> Point:
    """Point of the region minimizing leg(prev -> p) + leg(p -> next).

    Flat optima resolve to the midpoint of the optimal interval per
    coordinate (or its nearest endpoint when the neighbor interval misses
    the region), via the closed form for plain boxes and LP face centering
    otherwise."""
    if region.is_point:
        return region.center
    if not region.half_planes and cfg.mode == "manhattan" and not cfg.projection8:
        out = []
        for axis in (0, 1):
            lo, hi = (region.x_bounds, region.y_bounds)[axis]
            a = min(prev_pt[axis], next_pt[axis])
            b = max(prev_pt[axis], next_pt[axis])
            ilo, ihi = max(a, lo), min(b, hi)
            if ilo <= ihi:
                out.append(0.5 * (ilo + ihi))
            else:
                out.append(hi if a > hi else lo)
        return (out[0], out[1])

    p = LpProblem()
    cx = p.add_var(*region.x_bounds)
    cy = p.add_var(*region.y_bounds)
    for hp in region.half_planes:
        sense = "<=" if hp.sense == "le" else ">="
        p.add_constraint({cx: -hp.slope, cy: 1.0}, sense, hp.intercept)
    for qx, qy in (prev_pt, next_pt):
        if cfg.mode == "manhattan":
            add_abs_gadget(p, {cx: 1.0}, const=-qx, weight=1.0)
            add_abs_gadget(p, {cy: 1.0}, const=-qy, weight=1.0)
        else:
            # s >= prediction, s >= 0, priced at 1: models max(0, affine)
            txp, txm = add_abs_gadget(p, {cx: 1.0}, const=-qx, weight=0.0)
            typ, tym = add_abs_gadget(p, {cy: 1.0}, const=-qy, weight=0.0)
            k = model.bias - model.c_dx * model.mean_dx - model.c_dy * model.mean_dy
            s = p.add_var(0.0, INF, 1.0)
            p.add_constraint(
                {s: 1.0, txp: -model.c_dx, txm: -model.c_dx, typ: -model.c_dy, tym: -model.c_dy},
                ">=",
                k,
            )
        if cfg.projection8:
            from cetsp.milp import PROJ_AXES

            for ck, sk in PROJ_AXES:
                add_abs_gadget(
                    p, {cx: ck, cy: sk}, const=-(ck * qx + sk * qy), weight=cfg.projection_weight
                )
    sol, centered = solve_lp_centered(p, [cx, cy])
    if sol.status != "optimal":  # pragma: no cover - region boxes are never empty
        raise RuntimeError("relocation subproblem came back " + sol.status)
    pt = (centered[cx], centered[cy])
    if not contains(region, pt):
        pt = clip_toward(region, region.center, pt)
    return pt


def pull_toward_chord(
    current: Point,
    prev_pt: Point,
    next_pt: Point,
    region: ConvexRegion,
    cfg: ObjectiveConfig,
    model: Optional[RegressionModel] = None,
) -> Point:
    """Slide the point toward the foot of the perpendicular dropped on the
    prev-next chord, clipped to the region; keep only if not worse."""
    if not contains(region, current):
        raise ValueError(f"current point {current} outside its region")
    if prev_pt == next_pt:
        foot = prev_pt
    else:
        foot = foot_of_perpendicular(current, prev_pt, next_pt)
    cand = clip_toward(region, current, foot)
    old = edge_cost(prev_pt, current, cfg, model) + edge_cost(current, next_pt, cfg, model)
    new = edge_cost(prev_pt, cand, cfg, model) + edge_cost(cand, next_pt, cfg, model)
    return cand if new <= old else current


# ---------------------------------------------------------------------------
# main loop

def _tsp_order(points: Sequence[Point]) -> List[int]:
    n = len(points)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = euclidean(points[i], points[j])
    if n <= HELD_KARP_MAX:
        order, _ = held_karp(d)
    else:
        order, _ = nn_two_opt(d)
    return order


def _sweep(
    order: Sequence[int],
    points: List[Point],
    regions: Sequence[ConvexRegion],
    cfg: SolverConfig,
    hops: int,
) -> None:
    """One in-place relocation pass in route order: exact re-place against
    the neighbors `hops` positions away, then the chord pull.  Every change
    is gated on the node's own 1-hop legs not getting worse."""
    n = len(order)
    for pos in range(n):
        node = order[pos]
        region = regions[node]
        if region.is_point:
            continue
        prev1 = points[order[pos - 1]]
        next1 = points[order[(pos + 1) % n]]
        anchor_prev = points[order[pos - hops]]
        anchor_next = points[order[(pos + hops) % n]]
        cand = relocate_between(anchor_prev, anchor_next, region, cfg.objective, cfg.regression)
        old = _leg_cost(prev1, points[node], cfg) + _leg_cost(points[node], next1, cfg)
        new = _leg_cost(prev1, cand, cfg) + _leg_cost(cand, next1, cfg)
        if new <= old:
            points[node] = cand
        points[node] = pull_toward_chord(
            points[node], prev1, next1, region, cfg.objective, cfg.regression
        )


def solve_fragmented(
    inst: Instance, cfg: SolverConfig, cost_trace: Optional[List[float]] = None
) -> RouteState:
    """Run the alternating order/relocate search and return the final tour.

    cost_trace, if given, collects the surrogate cost after the initial
    ordering and after every accepted step; the sequence never increases."""
    t0 = time.perf_counter()
    if inst.n_nodes < 2:
        raise ValueError("need a depot and at least one sensor")
    regions = build_regions(inst, cfg.region_kind)
    points = super_nodes(inst, regions)
    order = _tsp_order(points)
    ncost = route_surrogate_cost(order, points, cfg)
    ocost = COST_SENTINEL if ncost <= COST_SENTINEL else INF
    iterations = 0
    if cost_trace is not None:
        cost_trace.append(ncost)

    for _ in range(cfg.max_outer_iters):
        guard = 0
        while ocost - ncost > cfg.improvement_tol and guard < cfg.max_outer_iters:
            ocost = ncost
            _sweep(order, points, regions, cfg, hops=1)
            _sweep(order, points, regions, cfg, hops=2)
            ncost = route_surrogate_cost(order, points, cfg)
            iterations += 1
            guard += 1
            if cost_trace is not None:
                cost_trace.append(ncost)
        new_order = _tsp_order(points)
        new_cost = route_surrogate_cost(new_order, points, cfg)
        if ncost - new_cost > cfg.improvement_tol:
            order, ncost = new_order, new_cost
            ocost = INF  # re-enter relocation against the new neighbors
            if cost_trace is not None:
                cost_trace.append(ncost)
        else:
            break

    man = 0.0
    euc = 0.0
    for k in range(len(order)):
        a, b = points[order[k]], points[order[(k + 1) % len(order)]]
        man += manhattan(a, b)
        euc += euclidean(a, b)
    return RouteState(
        order=tuple(order),
        u=positions_of(order),
        hitting_points=tuple(points),
        manhattan_cost=man,
        euclidean_cost=euc,
        iterations=iterations,
        time_ms=(time.perf_counter() - t0) * 1000.0,
    )


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidationReport:
    circle_ok: bool
    bad_sensors: Tuple[int, ...]
    route_ok: bool
    cost_ok: bool

    @property
    def ok(self) -> bool:
        return self.circle_ok and self.route_ok and self.cost_ok


def validate_solution(inst: Instance, rs: RouteState, tol: float = 1e-9) -> ValidationReport:
    """Check the original disk constraints (never the inner approximations),
    route well-formedness, and that the stored costs match the points."""
    bad = []
    for s in inst.sensors:
        px, py = rs.hitting_points[s.id]
        if (px - s.x) ** 2 + (py - s.y) ** 2 > s.r * s.r + tol:
            bad.append(s.id)
    route_ok = (
        len(rs.order) == inst.n_nodes
        and rs.order[0] == 0
        and sorted(rs.order) == list(range(inst.n_nodes))
        and rs.u == positions_of(rs.order)
        and len(rs.hitting_points) == inst.n_nodes
    )
    man = 0.0
    euc = 0.0
    if route_ok:
        for k in range(len(rs.order)):
            a = rs.hitting_points[rs.order[k]]
            b = rs.hitting_points[rs.order[(k + 1) % len(rs.order)]]
            man += manhattan(a, b)
            euc += euclidean(a, b)
    cost_ok = route_ok and abs(man - rs.manhattan_cost) <= 1e-6 and abs(euc - rs.euclidean_cost) <= 1e-6
    return ValidationReport(
        circle_ok=not bad, bad_sensors=tuple(bad), route_ok=route_ok, cost_ok=cost_ok
    )


def config_summary(cfg: SolverConfig) -> Dict:
    reg = None
    if cfg.regression is not None:
        r = cfg.regression
        reg = {"c_dx": r.c_dx, "c_dy": r.c_dy, "mean_dx": r.mean_dx, "mean_dy": r.mean_dy, "bias": r.bias}
    return {
        "region_kind": cfg.region_kind,
        "mode": cfg.objective.mode,
        "projection8": cfg.objective.projection8,
        "projection_weight": cfg.objective.projection_weight,
        "regression": reg,
        "max_outer_iters": cfg.max_outer_iters,
        "improvement_tol": cfg.improvement_tol,
    }
