"""Independent reference optima for small instances.

For a FIXED visiting order the best Manhattan hitting points solve a single
LP: per-leg absolute differences via split variables, coordinates
constrained to each node's convex region.  The global reference optimum
then enumerates every directed order (depot first) and keeps the cheapest;
ties resolve to the lexicographically smallest order.  This is deliberately
brute force: it exists to certify the heuristic solver, so it shares no
search logic with it.
"""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

from cetsp.geometry import ConvexRegion, Point
from cetsp.instances import Instance, generate_instance
from cetsp.simplex import LpProblem, add_abs_gadget, solve_lp

BRUTE_FORCE_MAX_NODES = 8


def optimal_fixed_order(
    inst: Instance, regions: Sequence[ConvexRegion], order: Sequence[int]
) -> Tuple[List[Point], float]:
    """Minimum total Manhattan length over hitting points for this order.

    Returns one point per node (indexed by node id, not order position) and
    the optimal cycle cost including the closing leg.
    """
    nn = inst.n_nodes
    if len(regions) != nn:
        raise ValueError("one region per node required")
    if len(order) != nn or order[0] != 0 or sorted(order) != list(range(nn)):
        raise ValueError(f"order must be a permutation of 0..{nn - 1} starting at 0")

    p = LpProblem()
    var_x: List[int] = []
    var_y: List[int] = []
    for reg in regions:
        var_x.append(p.add_var(reg.x_bounds[0], reg.x_bounds[1]))
        var_y.append(p.add_var(reg.y_bounds[0], reg.y_bounds[1]))
    for i, reg in enumerate(regions):
        for hp in reg.half_planes:
            sense = "<=" if hp.sense == "le" else ">="
            p.add_constraint({var_x[i]: -hp.slope, var_y[i]: 1.0}, sense, hp.intercept)
    for pos in range(nn):
        a, b = order[pos], order[(pos + 1) % nn]
        add_abs_gadget(p, {var_x[a]: 1.0, var_x[b]: -1.0})
        add_abs_gadget(p, {var_y[a]: 1.0, var_y[b]: -1.0})
    sol = solve_lp(p)
    if sol.status != "optimal":  # pragma: no cover - regions are never empty
        raise RuntimeError(f"fixed-order subproblem came back {sol.status}")
    points = [(sol.values[var_x[i]], sol.values[var_y[i]]) for i in range(nn)]
    return points, sol.objective_value


def brute_force_opt(
    inst: Instance, regions: Sequence[ConvexRegion]
) -> Tuple[List[int], List[Point], float]:
    """Exact optimum by enumerating all directed orders (depot fixed).

    Guarded at 8 nodes (5040 orders); ties pick the lexicographically
    smallest order, which enumeration order plus strict improvement gives
    for free.
    """
    nn = inst.n_nodes
    if nn > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_MAX_NODES} nodes, got {nn}")
    if nn < 2:
        raise ValueError("need a depot and at least one sensor")
    best_cost = float("inf")
    best_order: List[int] = []
    best_points: List[Point] = []
    for perm in itertools.permutations(range(1, nn)):
        order = [0, *perm]
        points, cost = optimal_fixed_order(inst, regions, order)
        if cost < best_cost:
            best_cost, best_order, best_points = cost, order, points
    return best_order, best_points, best_cost


def certified_optima(
    seeds: Sequence[int],
    n: int = 6,
    bbox: Tuple[float, float] = (1000.0, 1000.0),
    r_range: Tuple[float, float] = (60.0, 160.0),
    region_kind: str = "hexagon",
) -> List[Tuple[int, int, float]]:
    """(seed, n, optimal_cost) rows for generated instances; the reference
    data behind the committed fixture file."""
    from cetsp.geometry import inscribe

    rows = []
    for seed in seeds:
        inst = generate_instance(n, bbox=bbox, r_range=r_range, seed=seed)
        regions = [inscribe(region_kind, s.center, s.r) for s in inst.sensors]
        _, _, cost = brute_force_opt(inst, regions)
        rows.append((seed, n, cost))
    return rows
