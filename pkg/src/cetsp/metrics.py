"""Distances and linear surrogate costs for tour legs.

The solver never prices a leg with the Euclidean norm directly; it uses one
of two linearizable surrogates, optionally augmented with an 8-axis
projection bundle:

* manhattan: |dx| + |dy|;
* regression: an affine fit c_dx*(|dx| - mean_dx) + c_dy*(|dy| - mean_dy)
  + bias of the Euclidean distance over uniformly drawn point pairs,
  clamped below at 0;
* projection8 (additive): weight * sum of the absolute projections of the
  leg onto the eight axes at angles k*pi/8.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from cetsp.geometry import Point, projection_lengths_8
from cetsp.rng import SplitMix64


def euclidean(p: Point, q: Point) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def manhattan(p: Point, q: Point) -> float:
    return abs(q[0] - p[0]) + abs(q[1] - p[1])


@dataclass(frozen=True)
class RegressionModel:
    """Affine surrogate of the Euclidean distance on (|dx|, |dy|).

    predict(adx, ady) = c_dx*(adx - mean_dx) + c_dy*(ady - mean_dy) + bias.
    With OLS on mean-centered inputs the bias equals the mean distance of
    the training sample.
    """

    c_dx: float
    c_dy: float
    mean_dx: float
    mean_dy: float
    bias: float

    def predict(self, adx: float, ady: float) -> float:
        return self.c_dx * (adx - self.mean_dx) + self.c_dy * (ady - self.mean_dy) + self.bias

    def to_json(self) -> str:
        return json.dumps(
            {
                "c_dx": self.c_dx,
                "c_dy": self.c_dy,
                "mean_dx": self.mean_dx,
                "mean_dy": self.mean_dy,
                "bias": self.bias,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "RegressionModel":
        d = json.loads(text)
        return RegressionModel(
            c_dx=float(d["c_dx"]),
            c_dy=float(d["c_dy"]),
            mean_dx=float(d["mean_dx"]),
            mean_dy=float(d["mean_dy"]),
            bias=float(d["bias"]),
        )


#: Reference coefficient set kept for comparison runs only (never fitted
#: here): c_dx = 170.98/235.656533, c_dy = 168.928/235.695644,
#: bias = 503.279.  The centering means were not published with the
#: coefficients and are stored as 0.
REFERENCE_MODEL = RegressionModel(
    c_dx=170.98 / 235.656533,
    c_dy=168.928 / 235.695644,
    mean_dx=0.0,
    mean_dy=0.0,
    bias=503.279,
)


def fit_from_arrays(adx: np.ndarray, ady: np.ndarray, dist: np.ndarray) -> RegressionModel:
    """Exact least squares of dist on (adx, ady) with mean-centered inputs.

    Rank-deficient designs (a constant column) get the minimum-norm
    solution, i.e. a 0 coefficient for the degenerate column.  A fully
    degenerate sample (both columns constant) is an error.
    """
    adx = np.asarray(adx, dtype=float)
    ady = np.asarray(ady, dtype=float)
    dist = np.asarray(dist, dtype=float)
    if adx.size < 2:
        raise ValueError("need at least two samples")
    mean_dx = float(adx.mean())
    mean_dy = float(ady.mean())
    bias = float(dist.mean())
    xc = np.column_stack([adx - mean_dx, ady - mean_dy])
    scale = float(np.abs(xc).max())
    if scale == 0.0 or not math.isfinite(scale):
        raise ValueError("degenerate sample: inputs are constant")
    coef, _, _, _ = np.linalg.lstsq(xc, dist - bias, rcond=None)
    return RegressionModel(
        c_dx=float(coef[0]), c_dy=float(coef[1]), mean_dx=mean_dx, mean_dy=mean_dy, bias=bias
    )


def fit_regression(n_samples: int, coord_range: float, seed: int) -> RegressionModel:
    """Fit the affine surrogate on point pairs drawn uniformly in
    [0, coord_range]^2.  Per sample the draw order is px, py, qx, qy."""
    if n_samples < 100:
        raise ValueError(f"n_samples too small to fit anything: {n_samples}")
    if coord_range <= 0:
        raise ValueError(f"coord_range must be positive, got {coord_range}")
    rng = SplitMix64(seed)
    u = rng.uniform_array(4 * n_samples).reshape(n_samples, 4) * coord_range
    dx = u[:, 2] - u[:, 0]
    dy = u[:, 3] - u[:, 1]
    adx = np.abs(dx)
    ady = np.abs(dy)
    dist = np.hypot(dx, dy)
    return fit_from_arrays(adx, ady, dist)


@dataclass(frozen=True)
class ObjectiveConfig:
    """Which surrogate prices a leg.

    mode: "manhattan" or "regression"; projection8 adds the 8-axis bundle
    scaled by projection_weight (>= 0).
    """

    mode: str = "manhattan"
    projection8: bool = False
    projection_weight: float = 1.0

    def __post_init__(self):
        if self.mode not in ("manhattan", "regression"):
            raise ValueError(f"unknown objective mode {self.mode!r}")
        if self.projection_weight < 0:
            raise ValueError(f"projection_weight must be >= 0, got {self.projection_weight}")


def edge_cost(
    p: Point, q: Point, cfg: ObjectiveConfig, model: Optional[RegressionModel] = None
) -> float:
    """Surrogate cost of the leg p -> q.  Symmetric in p and q."""
    adx = abs(q[0] - p[0])
    ady = abs(q[1] - p[1])
    if cfg.mode == "manhattan":
        cost = adx + ady
    else:
        if model is None:
            raise ValueError("regression mode needs a fitted RegressionModel")
        cost = max(0.0, model.predict(adx, ady))
    if cfg.projection8:
        cost += cfg.projection_weight * sum(projection_lengths_8((q[0] - p[0], q[1] - p[1])))
    return cost


def relative_error(achieved: float, best: float) -> float:
    """(achieved - best) / best."""
    if best <= 0:
        raise ValueError(f"best cost must be positive, got {best}")
    return (achieved - best) / best


def average_relative_error(pairs: list[Tuple[float, float]]) -> float:
    if not pairs:
        raise ValueError("no (achieved, best) pairs")
    return sum(relative_error(a, b) for a, b in pairs) / len(pairs)
