"""MILP formulations of the close-enough tour problem, exported as CPLEX LP
text for external solvers.  Nothing here is solved in-process.

Node 0 is the depot (coordinates fixed through equality bounds); each other
node i owns continuous hitting coordinates cx_i, cy_i constrained to its
inscribed region.  Arc binaries x_i_j (ordered pairs) with per-node degree
equations, pairwise antisymmetry and MTZ order integers u_i eliminate
subtours; u_0 is fixed to 0 and u_i ranges over [1, n].

Leg lengths |cx_i - cx_j| + |cy_i - cy_j| enter linearly in one of two ways:

* lin1: per-arc split variables with tx1 - tx2 = cx_j - cx_i (likewise ty),
  all four priced in the objective for every arc.  This is the classic
  gadget substituted verbatim; unselected arcs are NOT gated by x_i_j, so
  the relaxation prices the complete graph.  The gap is intentional: the
  variant is exported for comparison, warts and all.
* lin2: per-arc d-variables with big-M activation
  d >= +-(cx_i - cx_j) - M(1 - x_i_j), d >= 0, so unselected arcs may rest
  at 0.  M comes from big_m() and is safe for any in-region coordinates.

Objective modes mirror metrics.edge_cost: manhattan prices the d (or t)
variables at 1; regression prices them at c_dx/c_dy and attaches the
constant part of the affine model to x_i_j so only selected arcs pay it.
The optional 8-axis projection bundle adds per-arc, per-axis g-variables
with their own big-M rows (M' = M * max_k(|cos| + |sin|)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from cetsp.geometry import ConvexRegion, inscribe, projection_lengths_8
from cetsp.instances import Instance
from cetsp.metrics import ObjectiveConfig, RegressionModel

PROJ_AXES = tuple((math.cos(k * math.pi / 8.0), math.sin(k * math.pi / 8.0)) for k in range(1, 9))


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: Dict[str, float]
    sense: str  # "<=" | ">=" | "="
    rhs: float

    def slack(self, assignment: Dict[str, float]) -> float:
        """Nonnegative when the row holds; equalities return -|residual|."""
        lhs = sum(a * assignment.get(v, 0.0) for v, a in self.coeffs.items())
        if self.sense == "<=":
            return self.rhs - lhs
        if self.sense == ">=":
            return lhs - self.rhs
        return -abs(lhs - self.rhs)


@dataclass
class MilpModel:
    name: str
    objective: Dict[str, float] = field(default_factory=dict)
    rows: List[Row] = field(default_factory=list)
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    generals: List[str] = field(default_factory=list)
    binaries: List[str] = field(default_factory=list)
    big_m_value: Optional[float] = None


def big_m(inst: Instance) -> float:
    """Smallest safe activation constant: the larger side of the center
    bounding box plus twice the largest radius bounds any coordinate
    difference between in-region points."""
    xs = [s.x for s in inst.sensors]
    ys = [s.y for s in inst.sensors]
    r = max(s.r for s in inst.sensors)
    return max(max(xs) - min(xs), max(ys) - min(ys)) + 2.0 * r


def _region_rows(i: int, region: ConvexRegion) -> List[Row]:
    cx, cy = f"cx_{i}", f"cy_{i}"
    rows: List[Row] = []
    if region.kind == "square":
        rows.append(Row(f"reg_xlo_{i}", {cx: 1.0}, ">=", region.x_bounds[0]))
        rows.append(Row(f"reg_xhi_{i}", {cx: 1.0}, "<=", region.x_bounds[1]))
    else:
        labels = ("ur", "ul", "ll", "lr")
        for lab, hp in zip(labels, region.half_planes):
            sense = "<=" if hp.sense == "le" else ">="
            rows.append(Row(f"reg_{lab}_{i}", {cx: -hp.slope, cy: 1.0}, sense, hp.intercept))
    rows.append(Row(f"reg_ylo_{i}", {cy: 1.0}, ">=", region.y_bounds[0]))
    rows.append(Row(f"reg_yhi_{i}", {cy: 1.0}, "<=", region.y_bounds[1]))
    return rows


def build_model(
    inst: Instance,
    region_kind: str = "square",
    lin: str = "lin2",
    cfg: ObjectiveConfig = ObjectiveConfig(),
    model: Optional[RegressionModel] = None,
) -> MilpModel:
    if lin not in ("lin1", "lin2"):
        raise ValueError(f"unknown linearization {lin!r}")
    if cfg.mode == "regression" and model is None:
        raise ValueError("regression objective needs a RegressionModel")
    nn = inst.n_nodes
    if nn < 2:
        raise ValueError("need a depot and at least one sensor")
    n_sens = nn - 1
    arcs = [(i, j) for i in range(nn) for j in range(nn) if i != j]

    name = f"{inst.name or 'instance'}__{region_kind}__{lin}"
    if cfg.mode == "regression":
        name += "__reg"
    if cfg.projection8:
        name += "__proj8"

    m = MilpModel(name=name, big_m_value=big_m(inst))
    M = m.big_m_value
    if cfg.mode == "regression":
        wx, wy = model.c_dx, model.c_dy
        const = model.bias - model.c_dx * model.mean_dx - model.c_dy * model.mean_dy
    else:
        wx, wy = 1.0, 1.0
        const = 0.0

    for i, j in arcs:
        x = f"x_{i}_{j}"
        m.binaries.append(x)
        if const != 0.0:
            m.objective[x] = const

    depot = inst.sensors[0]
    m.bounds[f"cx_0"] = (depot.x, depot.x)
    m.bounds[f"cy_0"] = (depot.y, depot.y)
    m.bounds["u_0"] = (0.0, 0.0)
    for s in inst.sensors[1:]:
        m.bounds[f"cx_{s.id}"] = (-math.inf, math.inf)
        m.bounds[f"cy_{s.id}"] = (-math.inf, math.inf)
        m.bounds[f"u_{s.id}"] = (1.0, float(n_sens))
        m.generals.append(f"u_{s.id}")

    for i in range(nn):
        out = {f"x_{i}_{j}": 1.0 for j in range(nn) if j != i}
        m.rows.append(Row(f"deg_out_{i}", out, "=", 1.0))
        inc = {f"x_{j}_{i}": 1.0 for j in range(nn) if j != i}
        m.rows.append(Row(f"deg_in_{i}", inc, "=", 1.0))
    for i in range(nn):
        for j in range(i + 1, nn):
            m.rows.append(Row(f"antisym_{i}_{j}", {f"x_{i}_{j}": 1.0, f"x_{j}_{i}": 1.0}, "<=", 1.0))
    for i, j in arcs:
        if j == 0:
            continue
        coeffs = {f"u_{i}": 1.0, f"u_{j}": -1.0, f"x_{i}_{j}": float(n_sens)}
        m.rows.append(Row(f"mtz_{i}_{j}", coeffs, "<=", float(n_sens - 1)))

    for s in inst.sensors[1:]:
        m.rows.extend(_region_rows(s.id, inscribe(region_kind, s.center, s.r)))

    for i, j in arcs:
        cxi, cxj = f"cx_{i}", f"cx_{j}"
        cyi, cyj = f"cy_{i}", f"cy_{j}"
        x = f"x_{i}_{j}"
        if lin == "lin1":
            t = [f"tx1_{i}_{j}", f"tx2_{i}_{j}", f"ty1_{i}_{j}", f"ty2_{i}_{j}"]
            for v, w in zip(t, (wx, wx, wy, wy)):
                m.objective[v] = w
            m.rows.append(
                Row(f"lin1x_{i}_{j}", {t[0]: 1.0, t[1]: -1.0, cxj: -1.0, cxi: 1.0}, "=", 0.0)
            )
            m.rows.append(
                Row(f"lin1y_{i}_{j}", {t[2]: 1.0, t[3]: -1.0, cyj: -1.0, cyi: 1.0}, "=", 0.0)
            )
        else:
            dx, dy = f"dx_{i}_{j}", f"dy_{i}_{j}"
            m.objective[dx] = wx
            m.objective[dy] = wy
            m.rows.append(Row(f"lin2xp_{i}_{j}", {dx: 1.0, cxi: -1.0, cxj: 1.0, x: -M}, ">=", -M))
            m.rows.append(Row(f"lin2xm_{i}_{j}", {dx: 1.0, cxi: 1.0, cxj: -1.0, x: -M}, ">=", -M))
            m.rows.append(Row(f"lin2yp_{i}_{j}", {dy: 1.0, cyi: -1.0, cyj: 1.0, x: -M}, ">=", -M))
            m.rows.append(Row(f"lin2ym_{i}_{j}", {dy: 1.0, cyi: 1.0, cyj: -1.0, x: -M}, ">=", -M))

    if cfg.projection8:
        Mp = M * max(abs(c) + abs(s) for c, s in PROJ_AXES)
        w = cfg.projection_weight
        for i, j in arcs:
            cxi, cxj = f"cx_{i}", f"cx_{j}"
            cyi, cyj = f"cy_{i}", f"cy_{j}"
            x = f"x_{i}_{j}"
            for k, (ck, sk) in enumerate(PROJ_AXES, start=1):
                g = f"g{k}_{i}_{j}"
                m.objective[g] = w
                m.rows.append(
                    Row(
                        f"proj{k}p_{i}_{j}",
                        {g: 1.0, cxj: -ck, cxi: ck, cyj: -sk, cyi: sk, x: -Mp},
                        ">=",
                        -Mp,
                    )
                )
                m.rows.append(
                    Row(
                        f"proj{k}m_{i}_{j}",
                        {g: 1.0, cxj: ck, cxi: -ck, cyj: sk, cyi: -sk, x: -Mp},
                        ">=",
                        -Mp,
                    )
                )
    return m


def _num(v: float) -> str:
    s = f"{v:.9g}"
    return s


def _terms(coeffs: Dict[str, float]) -> str:
    parts: List[str] = []
    for name in sorted(coeffs):
        a = coeffs[name]
        if a == 0.0:
            continue
        if not parts:
            if a == 1.0:
                parts.append(name)
            elif a == -1.0:
                parts.append(f"- {name}")
            else:
                parts.append(f"{_num(a)} {name}")
        else:
            sign = "+" if a > 0 else "-"
            mag = abs(a)
            if mag == 1.0:
                parts.append(f"{sign} {name}")
            else:
                parts.append(f"{sign} {_num(mag)} {name}")
    return " ".join(parts) if parts else "0"


def export_lp(m: MilpModel) -> str:
    """Render the model in CPLEX LP text.  Sections appear in the fixed
    order Minimize / Subject To / Bounds / Generals / Binaries / End; rows
    and names are emitted sorted so output is byte-stable."""
    lines = [f"\\ {m.name}", "Minimize", f" obj: {_terms(m.objective)}", "Subject To"]
    for row in sorted(m.rows, key=lambda r: r.name):
        op = {"<=": "<=", ">=": ">=", "=": "="}[row.sense]
        lines.append(f" {row.name}: {_terms(row.coeffs)} {op} {_num(row.rhs)}")
    lines.append("Bounds")
    for name in sorted(m.bounds):
        lo, hi = m.bounds[name]
        if lo == hi:
            lines.append(f" {name} = {_num(lo)}")
        elif lo == -math.inf and hi == math.inf:
            lines.append(f" {name} free")
        elif hi == math.inf:
            lines.append(f" {name} >= {_num(lo)}")
        else:
            lines.append(f" {_num(lo)} <= {name} <= {_num(hi)}")
    if m.generals:
        lines.append("Generals")
        lines.extend(f" {v}" for v in sorted(m.generals))
    if m.binaries:
        lines.append("Binaries")
        lines.extend(f" {v}" for v in sorted(m.binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def route_assignment(
    inst: Instance,
    m: MilpModel,
    order: Sequence[int],
    points: Sequence[Tuple[float, float]],
) -> Dict[str, float]:
    """Variable values induced by a concrete tour: arc binaries and MTZ
    integers from the order, coordinates from the hitting points, d/t/g
    variables at their minimal feasible levels (selected arcs carry the
    actual differences, unselected lin2/projection arcs rest at 0)."""
    nn = inst.n_nodes
    a: Dict[str, float] = {}
    sel = set()
    for pos, node in enumerate(order):
        nxt = order[(pos + 1) % len(order)]
        sel.add((node, nxt))
        a[f"u_{node}"] = float(pos)
    for i in range(nn):
        for j in range(nn):
            if i != j:
                a[f"x_{i}_{j}"] = 1.0 if (i, j) in sel else 0.0
    for i, (px, py) in enumerate(points):
        a[f"cx_{i}"] = px
        a[f"cy_{i}"] = py
    for i in range(nn):
        for j in range(nn):
            if i == j:
                continue
            ddx = points[j][0] - points[i][0]
            ddy = points[j][1] - points[i][1]
            if f"dx_{i}_{j}" in m.objective:
                on = (i, j) in sel
                a[f"dx_{i}_{j}"] = abs(ddx) if on else 0.0
                a[f"dy_{i}_{j}"] = abs(ddy) if on else 0.0
            if f"tx1_{i}_{j}" in m.objective:
                a[f"tx1_{i}_{j}"] = max(ddx, 0.0)
                a[f"tx2_{i}_{j}"] = max(-ddx, 0.0)
                a[f"ty1_{i}_{j}"] = max(ddy, 0.0)
                a[f"ty2_{i}_{j}"] = max(-ddy, 0.0)
            if f"g1_{i}_{j}" in m.objective:
                on = (i, j) in sel
                for k, ln in enumerate(projection_lengths_8((ddx, ddy)), start=1):
                    a[f"g{k}_{i}_{j}"] = ln if on else 0.0
    return a
