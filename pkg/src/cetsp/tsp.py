"""Tour ordering over a cost matrix.

The matrix is whatever metric the caller supplies (the fragmented solver
feeds Euclidean distances between current hitting points).  Orders are
node-id permutations starting at depot 0; the closing leg back to 0 is
implied and included in every reported cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from cetsp.geometry import Point

HELD_KARP_MAX = 16


@dataclass(frozen=True)
class RouteState:
    """A tour plus the hitting points it visits.

    order: node ids, starts at 0, closing leg implied.
    u: u[i] = position of node i in order (u[0] = 0).
    Costs are over consecutive hitting points including the closing leg.
    """

    order: Tuple[int, ...]
    u: Tuple[int, ...]
    hitting_points: Tuple[Point, ...]
    manhattan_cost: float
    euclidean_cost: float
    iterations: int = 0
    time_ms: float = 0.0


def positions_of(order: Sequence[int]) -> Tuple[int, ...]:
    u = [0] * len(order)
    for pos, node in enumerate(order):
        u[node] = pos
    return tuple(u)


def tour_cost(dist: np.ndarray, order: Sequence[int]) -> float:
    total = 0.0
    for k in range(len(order)):
        total += dist[order[k], order[(k + 1) % len(order)]]
    return float(total)


def _check_matrix(dist) -> np.ndarray:
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise ValueError("cost matrix has non-finite entries")
    return d


def held_karp(dist) -> Tuple[List[int], float]:
    """Exact minimum tour by dynamic programming over subsets.

    Ties resolve to the lowest predecessor id, so the result is
    deterministic.  n is capped at 16 (13 MB of DP state).
    """
    d = _check_matrix(dist)
    n = d.shape[0]
    if not 2 <= n <= HELD_KARP_MAX:
        raise ValueError(f"held_karp handles 2..{HELD_KARP_MAX} nodes, got {n}")
    m = n - 1  # nodes 1..n-1 tracked in the mask
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int32)
    for j in range(m):
        dp[1 << j, j] = d[0, j + 1]
    for mask in range(1, size):
        for j in range(m):
            bit = 1 << j
            if not mask & bit or mask == bit:
                continue
            rest = mask ^ bit
            best = np.inf
            arg = -1
            for k in range(m):
                if rest & (1 << k) and dp[rest, k] + d[k + 1, j + 1] < best:
                    best = dp[rest, k] + d[k + 1, j + 1]
                    arg = k
            dp[mask, j] = best
            parent[mask, j] = arg

    full = size - 1
    best_cost = np.inf
    best_j = -1
    for j in range(m):
        c = dp[full, j] + d[j + 1, 0]
        if c < best_cost:
            best_cost, best_j = c, j
    order_rev = []
    mask, j = full, best_j
    while j >= 0:
        order_rev.append(j + 1)
        mask, j = mask ^ (1 << j), int(parent[mask, j])
    order = [0] + order_rev[::-1]
    return order, float(best_cost)


def nn_two_opt(dist) -> Tuple[List[int], float]:
    """Nearest neighbor from the depot, then first-improvement 2-opt to a
    local optimum.  Exchange deltas assume a symmetric matrix.  Ties pick the
    lowest node id; the whole procedure is deterministic."""
    d = _check_matrix(dist)
    n = d.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    unvisited = set(range(1, n))
    order = [0]
    while unvisited:
        here = order[-1]
        nxt = min(unvisited, key=lambda j: (d[here, j], j))
        order.append(nxt)
        unvisited.remove(nxt)

    cost = tour_cost(d, order)
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            a, b = order[i - 1], order[i]
            for j in range(i + 1, n):
                c, e = order[j], order[(j + 1) % n]
                delta = d[a, c] + d[b, e] - d[a, b] - d[c, e]
                if delta < -1e-12:
                    candidate = order[:i] + order[i : j + 1][::-1] + order[j + 1 :]
                    new_cost = tour_cost(d, candidate)
                    # the O(1) delta assumes symmetry; only keep real gains
                    if new_cost < cost - 1e-12:
                        order, cost = candidate, new_cost
                        improved = True
                        break
            if improved:
                break
    return order, cost
