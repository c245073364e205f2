"""avoidsim: deterministic 2D multicopter obstacle-avoidance simulator.

RRT* replanning over an incrementally sensed occupancy grid with square
obstacle inflation, a growing local planning window, mission-path
redirection, and jerk-limited vehicle dynamics.
"""

from .geometry import ConvexPolygon, WorldModel, rectangle
from .grid import CellState, OccupancyGrid
from .harness import RunMetrics, batch, emit_outputs, run
from .local_window import LocalMap, WindowSpec, compute_window, extract_local_map, maximize_map
from .mission import Follower, MissionConfig, MissionPlan, PathCost
from .rrt_star import PlannedPath, PlannerConfig, PlanResult, Tree, plan
from .scenarios import Scenario, builtin_scenario, load_scenario_file
from .sensor import Scan, SensorConfig, integrate_scan, scan
from .vehicle import DynamicsConfig, VehicleState, braking_distance, check_collision, step_towards

__version__ = "0.1.0"

__all__ = [
    "ConvexPolygon", "WorldModel", "rectangle",
    "CellState", "OccupancyGrid",
    "RunMetrics", "batch", "emit_outputs", "run",
    "LocalMap", "WindowSpec", "compute_window", "extract_local_map",
    "maximize_map",
    "Follower", "MissionConfig", "MissionPlan", "PathCost",
    "PlannedPath", "PlannerConfig", "PlanResult", "Tree", "plan",
    "Scenario", "builtin_scenario", "load_scenario_file",
    "Scan", "SensorConfig", "integrate_scan", "scan",
    "DynamicsConfig", "VehicleState", "braking_distance", "check_collision",
    "step_towards",
]
