"""Dense two-phase simplex for the small LPs used across the package.

Everything here is deliberately self-contained: fixed-order subproblems,
relocation subproblems and shared-point (super node) placement all reduce to
LPs with a handful of variables, and keeping the solver in-tree keeps the
toolkit dependency-free and bit-deterministic.

Implementation notes:

* general bounds are reduced to y >= 0 form (shift for a finite lower
  bound, mirror for an upper bound only, split for free variables; finite
  upper bounds become extra rows);
* phase 1 minimizes the sum of artificial variables, phase 2 the real
  objective; entering and leaving choices follow Bland's rule (lowest
  index), so cycling is impossible and results are deterministic;
* feasibility tolerance 1e-7, pivot tolerance 1e-9.

Absolute values enter objectives through the classic gadget
t+ - t- = expr with t+, t- >= 0: when the pair is priced in a minimized
objective, t+ + t- equals |expr| at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

INF = math.inf
FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
FACE_EPS = 1e-9
MAX_PIVOTS = 50000

Coeffs = Union[Dict[int, float], Sequence[float]]


@dataclass
class LpProblem:
    """min objective . x subject to rows and per-variable bounds."""

    objective: List[float] = field(default_factory=list)
    lower: List[float] = field(default_factory=list)
    upper: List[float] = field(default_factory=list)
    constraints: List[Tuple[Dict[int, float], str, float]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add_var(self, lo: float = 0.0, hi: float = INF, obj: float = 0.0) -> int:
        if lo > hi:
            raise ValueError(f"empty bound interval [{lo}, {hi}]")
        self.objective.append(obj)
        self.lower.append(lo)
        self.upper.append(hi)
        return len(self.objective) - 1

    def add_constraint(self, coeffs: Coeffs, sense: str, rhs: float) -> None:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad sense {sense!r}")
        if not isinstance(coeffs, dict):
            coeffs = {j: float(a) for j, a in enumerate(coeffs) if a != 0.0}
        else:
            coeffs = {int(j): float(a) for j, a in coeffs.items() if a != 0.0}
        for j in coeffs:
            if not 0 <= j < self.num_vars:
                raise IndexError(f"constraint references unknown variable {j}")
        self.constraints.append((coeffs, sense, float(rhs)))

    def copy(self) -> "LpProblem":
        return LpProblem(
            objective=list(self.objective),
            lower=list(self.lower),
            upper=list(self.upper),
            constraints=[(dict(c), s, r) for c, s, r in self.constraints],
        )


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: Tuple[float, ...] = ()
    objective_value: Optional[float] = None


def add_abs_gadget(p: LpProblem, coeffs: Dict[int, float], const: float = 0.0,
                   weight: float = 1.0) -> Tuple[int, int]:
    """Add t+, t- with t+ - t- = sum(coeffs . x) + const, both priced at
    weight in the objective.  Returns their indices."""
    tp = p.add_var(0.0, INF, weight)
    tm = p.add_var(0.0, INF, weight)
    row = {tp: 1.0, tm: -1.0}
    for j, a in coeffs.items():
        row[j] = row.get(j, 0.0) - a
    p.add_constraint(row, "=", const)
    return tp, tm


def _bland_entering(r: np.ndarray) -> int:
    idx = np.nonzero(r < -PIVOT_TOL)[0]
    return int(idx[0]) if idx.size else -1


def _ratio_leaving(T: np.ndarray, basis: List[int], col: int) -> int:
    best_i = -1
    best_ratio = INF
    best_label = -1
    colv = T[:, col]
    rhs = T[:, -1]
    for i in range(T.shape[0]):
        a = colv[i]
        if a > PIVOT_TOL:
            ratio = rhs[i] / a
            if ratio < best_ratio - PIVOT_TOL or (
                abs(ratio - best_ratio) <= PIVOT_TOL and (best_i == -1 or basis[i] < best_label)
            ):
                best_i, best_ratio, best_label = i, ratio, basis[i]
    return best_i


def _pivot(T: np.ndarray, r: np.ndarray, basis: List[int], pr: int, pc: int) -> None:
    T[pr] /= T[pr, pc]
    colv = T[:, pc].copy()
    colv[pr] = 0.0
    T -= np.outer(colv, T[pr])
    r -= r[pc] * T[pr, :-1]
    basis[pr] = pc


def _run_simplex(T: np.ndarray, r: np.ndarray, basis: List[int]) -> str:
    for _ in range(MAX_PIVOTS):
        pc = _bland_entering(r)
        if pc < 0:
            return "optimal"
        pr = _ratio_leaving(T, basis, pc)
        if pr < 0:
            return "unbounded"
        _pivot(T, r, basis, pr, pc)
    raise RuntimeError("simplex pivot cap exceeded")


def solve_lp(p: LpProblem) -> LpSolution:
    n = p.num_vars
    if n == 0:
        return LpSolution("optimal", (), 0.0)

    # Reduce general bounds to y >= 0 variables.
    # trans[j] = (mode, k, const): shift x=y+lo, mirror x=hi-y, free x=y_k-y_{k+1}
    trans: List[Tuple[str, int, float]] = []
    ny = 0
    upper_rows: List[Tuple[Dict[int, float], str, float]] = []
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if lo > hi:
            return LpSolution("infeasible")
        if lo > -INF:
            trans.append(("shift", ny, lo))
            if hi < INF:
                upper_rows.append(({j: 1.0}, "<=", hi))
            ny += 1
        elif hi < INF:
            trans.append(("mirror", ny, hi))
            ny += 1
        else:
            trans.append(("free", ny, 0.0))
            ny += 2

    def to_y(coeffs: Dict[int, float]) -> Tuple[Dict[int, float], float]:
        row: Dict[int, float] = {}
        shift = 0.0
        for j, a in coeffs.items():
            mode, k, const = trans[j]
            if mode == "shift":
                row[k] = row.get(k, 0.0) + a
                shift += a * const
            elif mode == "mirror":
                row[k] = row.get(k, 0.0) - a
                shift += a * const
            else:
                row[k] = row.get(k, 0.0) + a
                row[k + 1] = row.get(k + 1, 0.0) - a
        return row, shift

    rows: List[Tuple[Dict[int, float], str, float]] = []
    for coeffs, sense, rhs in list(p.constraints) + upper_rows:
        row, shift = to_y(coeffs)
        rhs -= shift
        if rhs < 0:  # normalize to rhs >= 0 before sizing the tableau
            row = {k: -a for k, a in row.items()}
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        rows.append((row, sense, rhs))

    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s in ("<=", ">="))
    n_art = sum(1 for _, s, _ in rows if s != "<=")
    # columns: y | slack/surplus | artificial | rhs
    first_slack = ny
    first_art = ny + n_slack
    ncols = ny + n_slack + n_art
    T = np.zeros((m, ncols + 1))
    basis: List[int] = [0] * m
    si = first_slack
    ai = first_art
    for i, (row, sense, rhs) in enumerate(rows):
        for k, a in row.items():
            T[i, k] = a
        T[i, -1] = rhs
        if sense == "<=":
            T[i, si] = 1.0
            basis[i] = si
            si += 1
        elif sense == ">=":
            T[i, si] = -1.0
            si += 1
            T[i, ai] = 1.0
            basis[i] = ai
            ai += 1
        else:
            T[i, ai] = 1.0
            basis[i] = ai
            ai += 1

    # Phase 1: min sum of artificials.
    if n_art:
        r1 = np.zeros(ncols)
        r1[first_art:] = 1.0
        for i in range(m):
            if basis[i] >= first_art:
                r1 -= T[i, :-1]
        status = _run_simplex(T, r1, basis)
        if status != "optimal":  # pragma: no cover - phase 1 cannot be unbounded
            raise RuntimeError("phase 1 returned " + status)
        z1 = sum(T[i, -1] for i in range(m) if basis[i] >= first_art)
        if z1 > FEAS_TOL:
            return LpSolution("infeasible")
        # Drive leftover artificials out of the basis (degenerate rows).
        drop: List[int] = []
        for i in range(m):
            if basis[i] >= first_art:
                pcs = np.nonzero(np.abs(T[i, :first_art]) > PIVOT_TOL)[0]
                if pcs.size:
                    _pivot(T, r1, basis, i, int(pcs[0]))
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            T = T[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)

    T = np.hstack([T[:, :first_art], T[:, -1:]])
    ncols = first_art

    # Phase 2 objective over transformed variables.
    c = np.zeros(ncols)
    for j in range(n):
        mode, k, _ = trans[j]
        cj = p.objective[j]
        if mode == "shift":
            c[k] += cj
        elif mode == "mirror":
            c[k] -= cj
        else:
            c[k] += cj
            c[k + 1] -= cj
    r = c.copy()
    for i in range(m):
        if c[basis[i]] != 0.0:
            r -= c[basis[i]] * T[i, :-1]
    status = _run_simplex(T, r, basis)
    if status == "unbounded":
        return LpSolution("unbounded")

    y = np.zeros(ncols)
    for i in range(m):
        y[basis[i]] = T[i, -1]
    x = np.zeros(n)
    for j in range(n):
        mode, k, const = trans[j]
        if mode == "shift":
            x[j] = y[k] + const
        elif mode == "mirror":
            x[j] = const - y[k]
        else:
            x[j] = y[k] - y[k + 1]
    obj = float(np.dot(np.asarray(p.objective), x))
    return LpSolution("optimal", tuple(float(v) for v in x), obj)


def solve_lp_centered(p: LpProblem, center_vars: Iterable[int]) -> Tuple[LpSolution, Tuple[float, ...]]:
    """Solve p, then pick a deterministic point of the optimal face.

    Within objective <= optimum + 1e-9, the sum of the center variables is
    minimized and maximized and the two argmin vectors are averaged.  On a
    separable (box) optimal face this is the per-coordinate midpoint; in
    general it is a deterministic point of the face.  Returns the original
    solution and the centered values.
    """
    sol = solve_lp(p)
    if sol.status != "optimal":
        return sol, ()
    center_vars = list(center_vars)
    budget = p.copy()
    obj_row = {j: a for j, a in enumerate(budget.objective) if a != 0.0}
    budget.add_constraint(obj_row, "<=", sol.objective_value + FACE_EPS)
    budget.objective = [0.0] * budget.num_vars
    for j in center_vars:
        budget.objective[j] = 1.0
    lo = solve_lp(budget)
    for j in center_vars:
        budget.objective[j] = -1.0
    hi = solve_lp(budget)
    if lo.status != "optimal" or hi.status != "optimal":  # pragma: no cover
        raise RuntimeError("face centering lost feasibility")
    centered = tuple(0.5 * (a + b) for a, b in zip(lo.values, hi.values))
    return sol, centered
