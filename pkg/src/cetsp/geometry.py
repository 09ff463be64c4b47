"""Convex inner approximations of sensor disks and point geometry.

A disk of radius r is replaced by an inscribed convex region so that hitting
points can be constrained by linear inequalities:

* square: axis-aligned, half-side l = r/sqrt(2);
* regular hexagon: vertices at angles 0, 60, ..., 300 degrees, i.e.
  A(m+r, n), B(m+a, n+b), C(m-a, n+b), D(m-r, n), E(m-a, n-b), F(m+a, n-b)
  with a = r*cos(pi/3), b = r*sin(pi/3).  The four slanted edges become
  half-planes on the line through each vertex pair (slope from the two-point
  formula); the two horizontal edges become the y bounds.

Any point of a region lies inside the parent disk.  r = 0 degenerates to a
single point, which is how the depot is represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

Point = Tuple[float, float]

#: interior membership slack, meters
CONTAINS_TOL = 1e-9

#: strict-overlap margin for disk adjacency
OVERLAP_EPS = 1e-9


@dataclass(frozen=True)
class HalfPlane:
    """sense 'le': cy <= slope*cx + intercept; sense 'ge': cy >= ..."""

    slope: float
    intercept: float
    sense: str

    def holds(self, p: Point, tol: float = CONTAINS_TOL) -> bool:
        line = self.slope * p[0] + self.intercept
        if self.sense == "le":
            return p[1] <= line + tol
        return p[1] >= line - tol


@dataclass(frozen=True)
class ConvexRegion:
    kind: str  # "square" | "hexagon"
    center: Point
    radius: float
    x_bounds: Tuple[float, float]
    y_bounds: Tuple[float, float]
    half_planes: Tuple[HalfPlane, ...] = ()

    @property
    def is_point(self) -> bool:
        return self.x_bounds[0] == self.x_bounds[1] and self.y_bounds[0] == self.y_bounds[1]


def inscribe_square(center: Point, r: float) -> ConvexRegion:
    if r < 0:
        raise ValueError(f"negative radius {r}")
    l = r / math.sqrt(2.0)
    m, n = center
    return ConvexRegion(
        kind="square",
        center=center,
        radius=r,
        x_bounds=(m - l, m + l),
        y_bounds=(n - l, n + l),
    )


def _edge(p1: Point, p2: Point, sense: str) -> HalfPlane:
    s = (p2[1] - p1[1]) / (p2[0] - p1[0])
    return HalfPlane(slope=s, intercept=p1[1] - s * p1[0], sense=sense)


def inscribe_hexagon(center: Point, r: float) -> ConvexRegion:
    if r < 0:
        raise ValueError(f"negative radius {r}")
    m, n = center
    if r == 0.0:
        return ConvexRegion("hexagon", center, 0.0, (m, m), (n, n))
    a = r * math.cos(math.pi / 3.0)
    b = r * math.sin(math.pi / 3.0)
    va = (m + r, n)
    vb = (m + a, n + b)
    vc = (m - a, n + b)
    vd = (m - r, n)
    ve = (m - a, n - b)
    vf = (m + a, n - b)
    planes = (
        _edge(va, vb, "le"),  # upper right
        _edge(vc, vd, "le"),  # upper left
        _edge(vd, ve, "ge"),  # lower left
        _edge(vf, va, "ge"),  # lower right
    )
    return ConvexRegion("hexagon", center, r, (m - r, m + r), (n - b, n + b), planes)


def inscribe(kind: str, center: Point, r: float) -> ConvexRegion:
    if kind == "square":
        return inscribe_square(center, r)
    if kind == "hexagon":
        return inscribe_hexagon(center, r)
    raise ValueError(f"unknown region kind {kind!r}")


def contains(region: ConvexRegion, p: Point, tol: float = CONTAINS_TOL) -> bool:
    x, y = p
    if not (region.x_bounds[0] - tol <= x <= region.x_bounds[1] + tol):
        return False
    if not (region.y_bounds[0] - tol <= y <= region.y_bounds[1] + tol):
        return False
    return all(hp.holds(p, tol) for hp in region.half_planes)


@dataclass(frozen=True)
class OverlapGroups:
    """Connected components of the strict disk-overlap graph.

    Each group is an ascending tuple of sensor ids; groups are sorted by
    their smallest member.  Singletons are included.  The depot (id 0) never
    participates.
    """

    groups: Tuple[Tuple[int, ...], ...]


def disk_overlap_groups(inst) -> OverlapGroups:
    ids = [s.id for s in inst.sensors[1:]]
    parent = {i: i for i in ids}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    sensors = inst.sensors
    for ai in range(1, len(sensors)):
        for bi in range(ai + 1, len(sensors)):
            sa, sb = sensors[ai], sensors[bi]
            if math.hypot(sa.x - sb.x, sa.y - sb.y) < sa.r + sb.r - OVERLAP_EPS:
                ra, rb = find(sa.id), find(sb.id)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

    buckets: dict[int, list[int]] = {}
    for i in ids:
        buckets.setdefault(find(i), []).append(i)
    groups = tuple(tuple(sorted(v)) for _, v in sorted(buckets.items()))
    return OverlapGroups(groups=groups)


def foot_of_perpendicular(p: Point, a: Point, b: Point) -> Point:
    """Orthogonal projection of p onto the infinite line through a and b."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    ab2 = abx * abx + aby * aby
    if ab2 == 0.0:
        raise ValueError("degenerate chord: a == b")
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / ab2
    return (a[0] + t * abx, a[1] + t * aby)


def projection_lengths_8(delta: Point) -> Tuple[float, ...]:
    """|<delta, u_k>| on the eight axes u_k = (cos k*pi/8, sin k*pi/8), k=1..8.

    The angle multiset is pi/8-periodic modulo pi, so the sum of the eight
    lengths is invariant when delta is rotated by any multiple of pi/8.
    """
    dx, dy = delta
    out = []
    for k in range(1, 9):
        th = k * math.pi / 8.0
        out.append(abs(math.cos(th) * dx + math.sin(th) * dy))
    return tuple(out)


def clip_toward(region: ConvexRegion, from_pt: Point, target: Point) -> Point:
    """Farthest point toward target along [from_pt, target] that stays inside.

    from_pt must already satisfy contains() at the usual tolerance; the
    boundary crossing is located by bisection to 1e-9 meters.  The search
    itself tests membership exactly so the result never drifts outside the
    region (a from_pt sitting on the boundary just stays put).
    """
    if not contains(region, from_pt):
        raise ValueError(f"from_pt {from_pt} outside region at {region.center}")
    if contains(region, target, 0.0):
        return target
    if not contains(region, from_pt, 0.0):
        return from_pt
    dist = math.hypot(target[0] - from_pt[0], target[1] - from_pt[1])
    lo, hi = 0.0, 1.0  # position at lo is inside, at hi outside
    while (hi - lo) * dist > 1e-9:
        mid = 0.5 * (lo + hi)
        q = (from_pt[0] + mid * (target[0] - from_pt[0]), from_pt[1] + mid * (target[1] - from_pt[1]))
        if contains(region, q, 0.0):
            lo = mid
        else:
            hi = mid
    return (from_pt[0] + lo * (target[0] - from_pt[0]), from_pt[1] + lo * (target[1] - from_pt[1]))


def region_vertices(region: ConvexRegion) -> Sequence[Point]:
    """Polygon outline for rendering, counterclockwise from the +x vertex."""
    m, n = region.center
    if region.is_point:
        return [(m, n)]
    if region.kind == "square":
        x0, x1 = region.x_bounds
        y0, y1 = region.y_bounds
        return [(x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    r = region.radius
    a = r * math.cos(math.pi / 3.0)
    b = r * math.sin(math.pi / 3.0)
    return [(m + r, n), (m + a, n + b), (m - a, n + b), (m - r, n), (m - a, n - b), (m + a, n - b)]
