"""Built-in scenario definitions and the scenario/config file format.

The two built-in obstacle courses follow the published description (pillar
course and U-shaped trap on a (0,0) -> (50,0) mission); exact coordinates
are committed here so runs are reproducible.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import ConvexPolygon, WorldModel, rectangle
from .local_window import WindowSpec
from .mission import MissionConfig, MissionPlan
from .rrt_star import PlannerConfig
from .sensor import SensorConfig
from .vehicle import DynamicsConfig


class ScenarioError(ValueError):
    pass


@dataclass
class GridConfig:
    cell_size: float = 0.5
    rim_width: float = 0.5
    bounds: tuple[float, float, float, float] = (-20.0, -40.0, 70.0, 40.0)


@dataclass
class Scenario:
    name: str
    world: WorldModel
    mission: MissionPlan
    sensor: SensorConfig = field(default_factory=SensorConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    window: WindowSpec = field(default_factory=WindowSpec)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    mission_cfg: MissionConfig = field(default_factory=MissionConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    vehicle_radius: float = 0.35
    dt: float = 0.02

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.world.bounds
        for wp in self.mission.global_waypoints:
            if not (xmin <= wp[0] <= xmax and ymin <= wp[1] <= ymax):
                raise ScenarioError(f"mission waypoint {wp} outside world bounds")
        for endpoint in (self.mission.global_waypoints[0],
                         self.mission.global_waypoints[-1]):
            if self.world.contains(endpoint):
                raise ScenarioError("mission endpoint inside an obstacle")


_MISSION = np.array([[0.0, 0.0], [50.0, 0.0]])


def builtin_scenario(name: str, v_cruise: float = 4.0) -> Scenario:
    """world1 (pillar course), world2 (U-shaped trap) or empty."""
    dynamics = DynamicsConfig(v_cruise=v_cruise)
    if name == "world1":
        # four 2x2 m pillars near x = 25: two straddling y = 0 block the
        # direct path, two outboard leave only narrow passages after the
        # 3 m inflation.
        pillars = [
            rectangle(24.0, 1.0, 26.0, 3.0),
            rectangle(24.0, -3.0, 26.0, -1.0),
            rectangle(24.0, 11.0, 26.0, 13.0),
            rectangle(24.0, -13.0, 26.0, -11.0),
        ]
        world = WorldModel(obstacles=pillars, bounds=(-20, -40, 70, 40))
    elif name == "world2":
        # U-shape opening towards the start: back wall beyond x = 25, arms
        # along the x-axis at y = +/-21.
        parts = [
            rectangle(27.0, -22.0, 29.0, 22.0),
            rectangle(12.0, 20.0, 29.0, 22.0),
            rectangle(12.0, -22.0, 29.0, -20.0),
        ]
        world = WorldModel(obstacles=parts, bounds=(-25, -45, 75, 45))
    elif name == "empty":
        world = WorldModel(obstacles=[], bounds=(-20, -40, 70, 40))
    else:
        raise ScenarioError(f"unknown scenario {name!r}")
    grid = GridConfig(bounds=(world.bounds))
    # manoeuvring happens close to freshly sensed obstacles, so cap the
    # speed there; the cruise segments still reach v_cruise
    mission_cfg = MissionConfig(avoid_speed=0.6 * v_cruise)
    # the local windows are small, so a modest sampling budget already
    # converges; replanning happens every step, which keeps paths fresh
    planner = PlannerConfig(max_iterations=600)
    return Scenario(name=name, world=world,
                    mission=MissionPlan(global_waypoints=_MISSION.copy()),
                    dynamics=dynamics, grid=grid, mission_cfg=mission_cfg,
                    planner=planner)


# -- file formats ----------------------------------------------------------

def _parse_points(text: str) -> np.ndarray:
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) % 2 != 0:
        raise ScenarioError("expected an even number of coordinates")
    return np.asarray(vals, dtype=float).reshape(-1, 2)


def load_scenario_file(path) -> Scenario:
    """Scenario file: INI sections [world], [mission] plus any parameter
    sections understood by apply_config. Rectangles are one per line as
    ``xmin ymin xmax ymax``; polygons as flat vertex lists."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ScenarioError(f"cannot read scenario file {path}")
    if "world" not in cp or "mission" not in cp:
        raise ScenarioError("scenario file needs [world] and [mission] sections")
    w = cp["world"]
    bounds = tuple(float(v) for v in w.get("bounds", "-20 -40 70 40").split())
    if len(bounds) != 4:
        raise ScenarioError("bounds must be 'xmin ymin xmax ymax'")
    obstacles: list[ConvexPolygon] = []
    for line in w.get("rects", "").strip().splitlines():
        vals = [float(v) for v in line.split()]
        if len(vals) != 4:
            raise ScenarioError(f"bad rect line {line!r}")
        obstacles.append(rectangle(*vals))
    for line in w.get("polys", "").strip().splitlines():
        obstacles.append(ConvexPolygon(_parse_points(line)))
    m = cp["mission"]
    mission = MissionPlan(global_waypoints=_parse_points(m["waypoints"]),
                          spacing=float(m.get("spacing", 2.0)))
    scenario = Scenario(name=w.get("name", "custom"),
                        world=WorldModel(obstacles=obstacles, bounds=bounds),
                        mission=mission,
                        grid=GridConfig(bounds=bounds))
    return apply_config(scenario, cp)


def load_config_file(scenario: Scenario, path) -> Scenario:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ScenarioError(f"cannot read config file {path}")
    return apply_config(scenario, cp)


_SECTION_FIELDS = {
    "dynamics": ("jerk", "a_max", "v_cruise", "heading_rate"),
    "planner": ("max_iterations", "path_resolution", "goal_bias",
                "near_radius", "radius_cap_factor", "goal_tolerance", "seed"),
    "window": ("d_corner", "d_safe", "expansion_step", "expansion_ceiling"),
    "sensor": ("fov_deg", "range", "ray_count", "mount_yaw", "noise_sigma"),
    "mission": ("spacing",),
    "mission_cfg": ("arrival_tolerance", "lookahead_min",
                    "offcourse_threshold", "rim_weight",
                    "replan_fail_limit", "brake_margin"),
    "grid": ("cell_size", "rim_width"),
    "simulation": ("dt", "vehicle_radius"),
}

_INT_FIELDS = {"max_iterations", "seed", "ray_count", "expansion_ceiling",
               "lookahead_min", "replan_fail_limit"}


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name in _INT_FIELDS:
        return int(raw)
    if name == "near_radius" and raw == "auto":
        return "auto"
    if name == "heading_rate" and raw in ("none", ""):
        return None
    return float(raw)


def apply_config(scenario: Scenario, cp: configparser.ConfigParser) -> Scenario:
    """Overlay ``key = value`` sections onto a scenario's parameter blocks."""
    out = scenario
    for section, fields in _SECTION_FIELDS.items():
        if section not in cp:
            continue
        updates = {}
        for key in fields:
            if key in cp[section]:
                updates[key] = _coerce(key, cp[section][key])
        if not updates:
            continue
        if section == "dynamics":
            out = replace(out, dynamics=replace(out.dynamics, **updates))
        elif section == "planner":
            out = replace(out, planner=replace(out.planner, **updates))
        elif section == "window":
            out = replace(out, window=replace(out.window, **updates))
        elif section == "sensor":
            out = replace(out, sensor=replace(out.sensor, **updates))
        elif section == "mission":
            out = replace(out, mission=replace(out.mission, **updates))
        elif section == "mission_cfg":
            out = replace(out, mission_cfg=replace(out.mission_cfg, **updates))
        elif section == "grid":
            out = replace(out, grid=replace(out.grid, **updates))
        elif section == "simulation":
            out = replace(out, **updates)
    return out
