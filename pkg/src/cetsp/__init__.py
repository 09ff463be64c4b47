"""Close-enough TSP toolkit.

A tour must pass within each sensor's communication disk, not through its
center.  The package replaces each disk by an inscribed convex region
(square or regular hexagon), prices tour legs with linear surrogates of the
Euclidean distance (Manhattan, a fitted affine regression, an 8-axis
projection bundle), and optimizes hitting points either exactly per fixed
order (LP), via an exported MILP, or with a fragmented relocation
heuristic.
"""

from cetsp.instances import Instance, Sensor, generate_instance, parse_instance, write_instance
from cetsp.geometry import (
    ConvexRegion,
    HalfPlane,
    OverlapGroups,
    clip_toward,
    contains,
    disk_overlap_groups,
    foot_of_perpendicular,
    inscribe_hexagon,
    inscribe_square,
    projection_lengths_8,
)
from cetsp.metrics import (
    ObjectiveConfig,
    RegressionModel,
    edge_cost,
    euclidean,
    fit_regression,
    manhattan,
)
from cetsp.solver import SolverConfig, solve_fragmented, validate_solution
from cetsp.tsp import RouteState, held_karp, nn_two_opt

__version__ = "0.1.0"
