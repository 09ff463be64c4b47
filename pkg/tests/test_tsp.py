import itertools
import math

import numpy as np
import pytest

from cetsp.rng import SplitMix64
from cetsp.tsp import HELD_KARP_MAX, held_karp, nn_two_opt, positions_of, tour_cost


def _euclid_matrix(points):
    n = len(points)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = math.hypot(points[i][0] - points[j][0], points[i][1] - points[j][1])
    return d


def _brute(dist):
    n = dist.shape[0]
    best, best_order = math.inf, None
    for perm in itertools.permutations(range(1, n)):
        order = [0, *perm]
        c = tour_cost(dist, order)
        if c < best:
            best, best_order = c, order
    return best_order, best


def _random_matrix(g, n, symmetric=True):
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = g.uniform(1.0, 100.0)
            d[j, i] = d[i, j] if symmetric else g.uniform(1.0, 100.0)
    return d


def test_positions_of():
    assert positions_of([0, 3, 1, 2]) == (0, 2, 3, 1)


def test_tour_cost_closes_the_loop():
    d = _euclid_matrix([(0, 0), (1, 0), (1, 1)])
    assert tour_cost(d, [0, 1, 2]) == pytest.approx(2.0 + math.sqrt(2.0))


def test_held_karp_square_corners():
    d = _euclid_matrix([(0, 0), (1, 0), (1, 1), (0, 1)])
    order, cost = held_karp(d)
    assert cost == pytest.approx(4.0)
    assert order[0] == 0 and sorted(order) == [0, 1, 2, 3]


def test_held_karp_two_nodes():
    d = np.array([[0.0, 5.0], [5.0, 0.0]])
    order, cost = held_karp(d)
    assert order == [0, 1]
    assert cost == 10.0


def test_held_karp_matches_enumeration():
    g = SplitMix64(99)
    for _ in range(10):
        d = _random_matrix(g, 7)
        order, cost = held_karp(d)
        _, ref = _brute(d)
        assert cost == pytest.approx(ref, abs=1e-9)
        assert tour_cost(d, order) == pytest.approx(cost, abs=1e-9)


def test_held_karp_asymmetric():
    g = SplitMix64(5)
    d = _random_matrix(g, 6, symmetric=False)
    order, cost = held_karp(d)
    _, ref = _brute(d)
    assert cost == pytest.approx(ref, abs=1e-9)


def test_held_karp_input_guards():
    with pytest.raises(ValueError):
        held_karp(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        held_karp(np.zeros((HELD_KARP_MAX + 1, HELD_KARP_MAX + 1)))
    with pytest.raises(ValueError):
        held_karp(np.zeros((3, 4)))
    bad = np.zeros((3, 3))
    bad[0, 1] = math.nan
    with pytest.raises(ValueError):
        held_karp(bad)


def test_two_opt_untangles_greedy_tour():
    # points on a line at 0, 1, -2, 4, -8: nearest-neighbor zigzags for a
    # cost of 30, one segment reversal reaches the optimal sweep of 24
    pts = [(0, 0), (1, 0), (-2, 0), (4, 0), (-8, 0)]
    d = _euclid_matrix(pts)
    order, cost = nn_two_opt(d)
    assert cost == pytest.approx(24.0)


def test_two_opt_never_beats_held_karp():
    g = SplitMix64(314)
    for _ in range(8):
        d = _random_matrix(g, 9)
        _, exact = held_karp(d)
        order, approx = nn_two_opt(d)
        assert approx >= exact - 1e-9
        assert tour_cost(d, order) == pytest.approx(approx, abs=1e-9)


def test_two_opt_is_2opt_optimal():
    """No single segment reversal can improve the returned tour."""
    g = SplitMix64(2718)
    d = _random_matrix(g, 10)
    order, cost = nn_two_opt(d)
    n = len(order)
    for i in range(1, n - 1):
        for j in range(i + 1, n):
            cand = order[:i] + order[i:j][::-1] + order[j:]
            assert tour_cost(d, cand) >= cost - 1e-9


def test_two_opt_deterministic():
    g = SplitMix64(1)
    d = _random_matrix(g, 12)
    assert nn_two_opt(d) == nn_two_opt(d.copy())


def test_two_opt_handles_large_n():
    g = SplitMix64(7)
    pts = [(g.uniform(0, 100), g.uniform(0, 100)) for _ in range(40)]
    d = _euclid_matrix(pts)
    order, cost = nn_two_opt(d)
    assert sorted(order) == list(range(40))
    assert cost > 0.0
