"""Deterministic simulation loop (sense -> map -> window -> mission ->
vehicle), batch execution, metrics, and artifact emission."""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import mission as mission_mod
from . import rrt_star, sensor, vehicle
from .grid import CellState, OccupancyGrid
from .local_window import compute_window, extract_local_map
from .mission import Follower, Mode
from .scenarios import Scenario

SIM_TIME_CAP = 300.0


@dataclass
class RunMetrics:
    v_max: float = 0.0
    v_avg_rrt: float = 0.0
    f_rrt_wall: float = 0.0        # successful plans per wall-clock second
    f_rrt_sim: float = 0.0         # successful plans per simulated second
    d_trv: float = 0.0
    completed: bool = False
    collided: bool = False
    expansions: int = 0
    runtime: float = 0.0           # wall-clock seconds
    sim_time: float = 0.0
    reason: str = ""


@dataclass
class TraceRecord:
    t: float
    position: np.ndarray
    velocity: np.ndarray
    speed: float
    state: str
    event: str


def _trace_event(events) -> str:
    """Collapse follower events onto the trace's one-tag vocabulary."""
    tags = {tag for tag, _ in events}
    if "plan_adopted" in tags:
        return "plan_adopted"
    if "map_expanded" in tags:
        return "map_expanded"
    if "transition" in tags:
        return "transition"
    return "none"


def run(scenario: Scenario, seed: int,
        sim_time_cap: float = SIM_TIME_CAP,
        disturb: tuple[float, float, float] | None = None
        ) -> tuple[RunMetrics, list[TraceRecord]]:
    """Simulate one mission; fully deterministic for a fixed seed.

    ``disturb`` is an optional (t, vx, vy) velocity impulse reproducing the
    wind-gust redirection case.
    """
    t_start = time.perf_counter()
    g = scenario.grid
    global_grid = OccupancyGrid.from_bounds(*g.bounds, cell_size=g.cell_size)
    start = scenario.mission.global_waypoints[0]
    goal = scenario.mission.global_waypoints[-1]
    veh = vehicle.VehicleState.at_rest(start, heading=math.atan2(
        goal[1] - start[1], goal[0] - start[0]))
    follower = Follower(plan=scenario.mission, window_spec=scenario.window,
                        cfg=scenario.mission_cfg)
    plan_calls = 0
    plan_successes = 0

    def planner(local_map, pos, target):
        nonlocal plan_calls, plan_successes
        # larger (expanded) windows need more samples to keep the failure
        # rate down; small windows converge well under the base budget
        cells = local_map.grid.width * local_map.grid.height
        budget = max(scenario.planner.max_iterations,
                     min(4000, int(0.3 * cells)))
        cfg = replace(scenario.planner, max_iterations=budget,
                      seed=(seed * 1_000_003 + plan_calls) % (2 ** 31))
        plan_calls += 1
        result = rrt_star.plan(local_map, pos, target, cfg)
        if result.ok:
            plan_successes += 1
        return result

    dt = scenario.dt
    trace: list[TraceRecord] = []
    collided = False
    t = 0.0
    local_cache: tuple | None = None
    disturbed = False
    while t < sim_time_cap:
        s = sensor.scan(scenario.world, veh.position, veh.heading,
                        scenario.sensor, timestamp=t)
        sensor.integrate_scan(global_grid, s)
        window = compute_window(veh.position, follower.window_target(),
                                follower.window_spec.d_corner)
        key = (_snap_key(global_grid, window), global_grid.revision,
               follower.window_spec.d_corner)
        if local_cache is None or local_cache[0] != key:
            local_map = extract_local_map(global_grid, window,
                                          follower.window_spec.d_safe,
                                          g.rim_width)
            local_cache = (key, local_map)
        else:
            local_map = local_cache[1]
        step = follower.step(local_map, veh.position, planner,
                             velocity=veh.velocity)
        veh = vehicle.step_towards(veh, step.setpoint, scenario.dynamics, dt,
                                   stop_distance=step.stop_distance,
                                   velocity_clearance=step.velocity_clearance,
                                   speed_limit=step.speed_limit)
        if disturb is not None and not disturbed and t >= disturb[0]:
            veh.velocity = veh.velocity + np.array(disturb[1:])
            disturbed = True
        t += dt
        collided_now = vehicle.check_collision(veh, scenario.world,
                                               scenario.vehicle_radius)
        trace.append(TraceRecord(t=t, position=veh.position.copy(),
                                 velocity=veh.velocity.copy(),
                                 speed=veh.speed,
                                 state=step.mode.value,
                                 event=_trace_event(step.events)))
        if collided_now:
            collided = True
            break
        if step.mode in (Mode.COMPLETED, Mode.FAILED):
            break
    runtime = time.perf_counter() - t_start
    metrics = _metrics_from_trace(trace, follower, collided, plan_successes,
                                  runtime, t, sim_time_cap)
    return metrics, trace


def _snap_key(grid: OccupancyGrid, window) -> tuple[int, int, int, int]:
    cs = grid.cell_size
    ox, oy = grid.origin
    return (int(math.floor((window[0] - ox) / cs)),
            int(math.floor((window[1] - oy) / cs)),
            int(math.ceil((window[2] - ox) / cs)),
            int(math.ceil((window[3] - oy) / cs)))


def _metrics_from_trace(trace, follower, collided, plan_successes,
                        runtime, sim_time, sim_time_cap) -> RunMetrics:
    m = RunMetrics(runtime=runtime, sim_time=sim_time, collided=collided,
                   expansions=follower.expansions)
    if not trace:
        m.reason = "empty"
        return m
    speeds = np.array([r.speed for r in trace])
    positions = np.array([r.position for r in trace])
    m.v_max = float(speeds.max())
    avoiding = np.array([r.state == Mode.AVOIDING.value for r in trace])
    m.v_avg_rrt = float(speeds[avoiding].mean()) if avoiding.any() else 0.0
    m.d_trv = float(np.sum(np.hypot(np.diff(positions[:, 0]),
                                    np.diff(positions[:, 1]))))
    m.f_rrt_wall = plan_successes / runtime if runtime > 0 else 0.0
    m.f_rrt_sim = plan_successes / sim_time if sim_time > 0 else 0.0
    final = trace[-1].state
    m.completed = final == Mode.COMPLETED.value and not collided
    if collided:
        m.reason = "collision"
    elif final == Mode.FAILED.value:
        m.reason = follower.fail_reason or "failed"
    elif not m.completed and sim_time >= sim_time_cap:
        m.reason = "time_cap"
    return m


@dataclass
class BatchSummary:
    metric_mean: dict[str, float]
    metric_std: dict[str, float]
    completed: int
    total: int
    collisions: int
    failures: int
    single_sample: bool
    runs: list[RunMetrics] = field(default_factory=list)

    @property
    def cmpl(self) -> str:
        return f"{self.completed:02d}|{self.total:02d}"


_BATCH_FIELDS = ("v_max", "v_avg_rrt", "f_rrt_wall", "f_rrt_sim",
                 "d_trv", "runtime")


def batch(scenario: Scenario, seeds) -> BatchSummary:
    """Run each seed and summarise per-metric mean and sample deviation."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    return summarize([run(scenario, seed)[0] for seed in seeds])


def summarize(runs: list[RunMetrics]) -> BatchSummary:
    mean = {}
    std = {}
    for name in _BATCH_FIELDS:
        vals = np.array([getattr(r, name) for r in runs])
        mean[name] = float(vals.mean())
        std[name] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return BatchSummary(
        metric_mean=mean, metric_std=std,
        completed=sum(1 for r in runs if r.completed),
        total=len(runs),
        collisions=sum(1 for r in runs if r.collided),
        failures=sum(1 for r in runs if r.reason in ("no_path", "failed")),
        single_sample=len(runs) == 1,
        runs=runs)


# -- artifact emission -----------------------------------------------------

TRACE_HEADER = ["t", "x", "y", "vx", "vy", "speed", "state", "event"]


def write_trace_csv(trace: list[TraceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for r in trace:
            w.writerow([f"{r.t:.6f}",
                        f"{r.position[0]:.9f}", f"{r.position[1]:.9f}",
                        f"{r.velocity[0]:.9f}", f"{r.velocity[1]:.9f}",
                        f"{r.speed:.9f}", r.state, r.event])


def write_metrics(metrics: RunMetrics, path) -> None:
    with open(path, "w") as fh:
        for key in ("v_max", "v_avg_rrt", "f_rrt_wall", "f_rrt_sim", "d_trv",
                    "completed", "collided", "expansions", "runtime",
                    "sim_time", "reason"):
            fh.write(f"{key} = {getattr(metrics, key)}\n")


def emit_outputs(scenario: Scenario, metrics: RunMetrics,
                 trace: list[TraceRecord], out_dir) -> list[str]:
    """Write trace CSV, metrics summary, inflated-grid PGM, and the two
    plot artifacts. Returns the created paths; an empty trace yields the
    headers-only CSV and raises for the plots."""
    os.makedirs(out_dir, exist_ok=True)
    created = []
    trace_path = os.path.join(out_dir, "trace.csv")
    write_trace_csv(trace, trace_path)
    created.append(trace_path)
    metrics_path = os.path.join(out_dir, "metrics.txt")
    write_metrics(metrics, metrics_path)
    created.append(metrics_path)
    if not trace:
        raise IOError(f"empty trace: no plots written to {out_dir}")
    # final global map, inflated the way the planner saw it
    g = scenario.grid
    global_grid = OccupancyGrid.from_bounds(*g.bounds, cell_size=g.cell_size)
    for rec in trace[:: max(1, len(trace) // 400)]:
        s = sensor.scan(scenario.world, rec.position,
                        math.atan2(rec.velocity[1], rec.velocity[0])
                        if rec.speed > 0.2 else 0.0,
                        scenario.sensor)
        sensor.integrate_scan(global_grid, s)
    inflated = global_grid.inflate(scenario.window.d_safe, g.rim_width)
    pgm_path = os.path.join(out_dir, "grid.pgm")
    inflated.to_pgm(pgm_path)
    created.append(pgm_path)
    created.append(_plot_trajectory(scenario, inflated, trace,
                                    os.path.join(out_dir, "trajectory.svg")))
    created.append(_plot_speed(trace, os.path.join(out_dir, "speed.svg")))
    return created


def _grid_image(grid: OccupancyGrid) -> np.ndarray:
    levels = np.zeros(256)
    levels[CellState.OCCUPIED] = 0.0
    levels[CellState.OUTER_RIM] = 0.5
    levels[CellState.UNKNOWN] = 0.78
    levels[CellState.FREE] = 1.0
    return levels[grid.cells]


def _plot_trajectory(scenario, inflated, trace, path) -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [r.position[0] for r in trace]
    ys = [r.position[1] for r in trace]
    fig, ax = plt.subplots(figsize=(9, 7))
    ax.imshow(_grid_image(inflated), origin="lower", cmap="gray",
              vmin=0.0, vmax=1.0, extent=inflated.extent)
    ax.plot(xs, ys, color="tab:red", lw=1.5, label="trajectory")
    wps = scenario.mission.global_waypoints
    ax.plot(wps[:, 0], wps[:, 1], "--", color="tab:blue", lw=1.0,
            label="mission")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"{scenario.name}: trajectory over inflated grid")
    ax.legend(loc="upper right")
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def _plot_speed(trace, path) -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [r.position[0] for r in trace]
    ys = [r.position[1] for r in trace]
    speeds = [r.speed for r in trace]
    fig, ax = plt.subplots(figsize=(9, 5))
    sc = ax.scatter(xs, ys, c=speeds, s=4, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="speed (m/s)")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title("speed along the flown path")
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
