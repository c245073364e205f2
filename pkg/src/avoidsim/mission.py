"""Mission follower: subdivides the survey path into incremental waypoints,
watches the direct route, triggers RRT* replanning with the rim-penalty
cost rule, smooths adopted paths, and redirects the vehicle back onto the
predefined path after each avoidance episode."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .grid import CellState
from .local_window import (ExpansionCeilingError, LocalMap, WindowSpec,
                           maximize_map)
from .rrt_star import PlannedPath, path_length


@dataclass
class MissionPlan:
    global_waypoints: np.ndarray   # (n, 2) survey path vertices
    spacing: float = 2.0

    def __post_init__(self):
        self.global_waypoints = np.asarray(self.global_waypoints, dtype=float)
        if self.global_waypoints.shape[0] < 2:
            raise ValueError("mission needs at least two waypoints")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")


@dataclass
class MissionConfig:
    arrival_tolerance: float = 0.75
    lookahead_min: int = 1
    offcourse_threshold: float = 1.5  # lateral slack before re-routing back
    pursuit_lookahead: float = 2.0  # minimum aim distance along the path
    pursuit_horizon: float = 1.0    # seconds of travel the aim point leads by
    recovery_speed: float = 1.0     # speed cap while backing out of a bad cell
    rim_weight: float = 0.8        # penalty factor on rim cells in the path cost
    replan_fail_limit: int = 10    # consecutive pathless failures before expansion
    commit_samples: int = 25       # plan draws gathered before committing pathless
    brake_margin: float = 0.5      # stop this far short of the first blocked cell
    avoid_speed: float | None = None   # speed cap while avoiding (None: cruise)


class Mode(Enum):
    ON_PATH = "on_path"
    AVOIDING = "avoiding"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class PathCost:
    c_length: float
    n_or: int
    cell_size: float
    rim_weight: float

    @property
    def c_new(self) -> float:
        return self.c_length + self.n_or * self.cell_size * self.rim_weight


@dataclass
class StepResult:
    setpoint: np.ndarray
    stop_distance: float
    events: list[tuple[str, object]]
    mode: Mode
    # distance to the first occupied cell straight ahead along the current
    # velocity; the vehicle emergency-brakes when this drops inside its
    # stopping distance
    velocity_clearance: float = math.inf
    speed_limit: float | None = None


def subdivide(plan: MissionPlan) -> np.ndarray:
    """Waypoints along the mission polyline at most ``spacing`` apart,
    always keeping the original vertices."""
    pts = [plan.global_waypoints[0]]
    for a, b in zip(plan.global_waypoints[:-1], plan.global_waypoints[1:]):
        seg = float(np.hypot(*(b - a)))
        if seg == 0.0:
            continue
        k = max(1, int(math.ceil(seg / plan.spacing - 1e-12)))
        for i in range(1, k + 1):
            pts.append(a + (b - a) * (i / k))
    return np.asarray(pts)


def check_direct(local_map: LocalMap, pos, wp) -> bool:
    """A direct mission segment must avoid occupied cells and the rim."""
    return local_map.grid.is_segment_free(pos, wp, rim_blocks=True)


def vacant(local_map: LocalMap, p) -> bool | None:
    """Whether p sits in a flyable target cell (free or still unexplored);
    None when p is outside the window."""
    state = local_map.grid.state_at(p)
    if state is None:
        return None
    return state in (CellState.FREE, CellState.UNKNOWN)


def select_avoidance_target(local_map: LocalMap, incrementals: np.ndarray,
                            current: int, lookahead_min: int = 1):
    """Resumption waypoint for an avoidance episode.

    Scans forward from ``current`` for the obstruction (the first
    contiguous run of non-vacant incremental waypoints) and returns the
    first vacant waypoint at least ``lookahead_min`` indices past its end,
    as (point, index). With no obstruction in sight (the off-course case)
    the nearest forward waypoint is returned. None when the relevant
    stretch leaves the window, i.e. the window must grow first."""
    n = incrementals.shape[0]
    j = current
    # find the obstruction start
    while j < n:
        v = vacant(local_map, incrementals[j])
        if v is None:
            return None            # path leaves the window before any block
        if not v:
            break
        j += 1
    if j == n:                     # nothing blocked: off-course case
        j = min(current, n - 1)
        return incrementals[j].copy(), j
    # skip the contiguous blocked run
    while j < n and vacant(local_map, incrementals[j]) is False:
        j += 1
    j += lookahead_min - 1
    while j < n:
        v = vacant(local_map, incrementals[j])
        if v is None:
            return None
        if v:
            return incrementals[j].copy(), j
        j += 1
    return None                    # blocked through the window edge


def path_cost_current(pos, remaining: list[np.ndarray], local_map: LocalMap,
                      rim_weight: float) -> PathCost:
    """Eq-style cost of the active path: remaining length plus the rim-cell
    penalty n_or * cell_size * rim_weight."""
    pts = [np.asarray(pos, float)] + [np.asarray(p, float) for p in remaining]
    return PathCost(c_length=path_length(pts),
                    n_or=local_map.grid.count_rim_cells(pts),
                    cell_size=local_map.grid.cell_size,
                    rim_weight=rim_weight)


def accept_or_keep(current: PathCost, incoming: PlannedPath) -> bool:
    """Adopt the incoming path only when strictly shorter than the penalised
    cost of the current one; ties keep the current path (no mid-air
    dithering on equal alternatives)."""
    return incoming.length < current.c_new


def smooth(points: list[np.ndarray], local_map: LocalMap) -> list[np.ndarray]:
    """Skip-node smoothing from the front: while the second waypoint is
    reachable directly from the current position, drop the first. Rim entry
    is allowed here, so smoothing may cut through the outer rim — but not
    through unknown space, which only the planner may traverse: a shortcut
    is a commitment close to the vehicle and must stay on sensed-free
    ground."""
    pts = [np.asarray(p, float) for p in points]
    while len(pts) >= 3 and local_map.grid.is_segment_free(
            pts[0], pts[2], rim_blocks=False, unknown_blocks=True):
        del pts[1]
    return pts


def free_distance_along(local_map: LocalMap, pos, points,
                        rim_blocks: bool = True,
                        sample_step: float | None = None) -> float:
    """Distance along pos->points polyline to the first blocked cell
    (inf when the whole polyline is clear). Sampled at quarter-cell
    resolution; used for braking, not for collision decisions."""
    g = local_map.grid
    if sample_step is None:
        sample_step = g.cell_size / 4.0
    pts = [np.asarray(pos, float)] + [np.asarray(p, float) for p in points]
    travelled = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        seg = float(np.hypot(*(b - a)))
        if seg < 1e-12:
            continue
        steps = max(1, int(math.ceil(seg / sample_step)))
        for i in range(steps + 1):
            p = a + (b - a) * (i / steps)
            state = g.state_at(p)
            if state is None:
                continue
            if state == CellState.OCCUPIED or (
                    rim_blocks and state == CellState.OUTER_RIM):
                return travelled + seg * (i / steps)
        travelled += seg
    return math.inf


@dataclass
class Follower:
    """Deterministic master-node state machine, stepped once per sim tick."""

    plan: MissionPlan
    window_spec: WindowSpec
    cfg: MissionConfig = field(default_factory=MissionConfig)

    def __post_init__(self):
        self.incrementals = subdivide(self.plan)
        self.mode = Mode.ON_PATH
        self.next_index = 1 if self.incrementals.shape[0] > 1 else 0
        self.active_path: list[np.ndarray] | None = None
        self.candidate = None
        self.commit_countdown = 0
        self.avoid_target: np.ndarray | None = None
        self.resume_index: int | None = None
        self.fail_reason: str | None = None
        self.fail_streak = 0
        self.expansions = 0
        self.last_free_pos: np.ndarray | None = None
        self._speed = 0.0
        self._base_spec = self.window_spec
        # incremental indices of the original mission vertices, so the
        # window can span the whole leg currently being flown
        self._leg_ends = []
        idx = 0
        for a, b in zip(self.plan.global_waypoints[:-1],
                        self.plan.global_waypoints[1:]):
            seg = float(np.hypot(*(b - a)))
            if seg == 0.0:
                continue
            idx += max(1, int(math.ceil(seg / self.plan.spacing - 1e-12)))
            self._leg_ends.append(idx)

    # the point the local window must contain besides the vehicle
    def window_target(self) -> np.ndarray:
        if self.mode == Mode.AVOIDING and self.avoid_target is not None:
            return self.avoid_target
        # the full leg ahead, so obstacles enter the window early enough
        # for the vehicle to brake before them
        for end in self._leg_ends:
            if end >= self.next_index:
                return self.incrementals[end]
        return self.incrementals[-1]

    def step(self, local_map: LocalMap, pos, planner,
             velocity=None) -> StepResult:
        """Advance the state machine one tick.

        ``planner`` is a callable (local_map, start, goal) -> PlanResult;
        it is invoked at most once per step while avoiding.
        """
        pos = np.asarray(pos, dtype=float)
        events: list[tuple[str, object]] = []
        self._speed = 0.0 if velocity is None else float(
            np.hypot(velocity[0], velocity[1]))
        if vacant(local_map, pos) is not False:
            self.last_free_pos = pos.copy()
        if self.mode in (Mode.COMPLETED, Mode.FAILED):
            return StepResult(self.incrementals[-1], 0.0, events, self.mode)
        if self.mode == Mode.ON_PATH:
            result = self._step_on_path(local_map, pos, events)
        else:
            result = self._step_avoiding(local_map, pos, planner, events)
        recovering = any(e[0] == "recovery" for e in events)
        if recovering:
            # deliberately escaping a bad cell: the clearance probe would
            # only pin the vehicle inside it
            result.speed_limit = self.cfg.recovery_speed
            return result
        if velocity is not None and result.mode in (Mode.ON_PATH,
                                                    Mode.AVOIDING):
            result.velocity_clearance = self._velocity_clearance(
                local_map, pos, velocity)
        if result.mode == Mode.AVOIDING:
            result.speed_limit = self.cfg.avoid_speed
        return result

    def _velocity_clearance(self, local_map, pos, velocity,
                            horizon: float = 15.0,
                            half_angle: float = math.radians(25.0),
                            rays: int = 7) -> float:
        """Distance to the nearest occupied cell in a narrow fan around the
        current velocity (momentum carries the vehicle there regardless of
        the setpoint, so it must always be able to stop short of it). The
        fan catches grazing approaches where the centre ray runs parallel
        to an obstacle boundary. Unexplored cells block the probe like
        occupied ones: the vehicle only commits speed to space it has
        actually sensed (or that inflation has proven clear)."""
        speed = float(np.hypot(velocity[0], velocity[1]))
        if speed <= 0.2:
            return math.inf
        g = local_map.grid
        base = math.atan2(velocity[1], velocity[0])
        angles = base + np.linspace(-half_angle, half_angle, rays)
        dists = np.arange(0.0, horizon, g.cell_size / 4.0)
        px = pos[0] + np.outer(np.cos(angles), dists)
        py = pos[1] + np.outer(np.sin(angles), dists)
        ix = np.floor((px - g.origin[0]) / g.cell_size).astype(np.int64)
        iy = np.floor((py - g.origin[1]) / g.cell_size).astype(np.int64)
        inside = ((ix >= 0) & (ix < g.width) & (iy >= 0) & (iy < g.height))
        vals = np.full(inside.shape, int(CellState.FREE), dtype=np.uint8)
        vals[inside] = g.cells[iy[inside], ix[inside]]
        hits = ((vals == CellState.OCCUPIED) |
                (vals == CellState.UNKNOWN)).any(axis=0)
        if not hits.any():
            return math.inf
        return float(dists[int(np.argmax(hits))])

    # -- on-path behaviour -------------------------------------------------

    def _step_on_path(self, local_map, pos, events) -> StepResult:
        last = self.incrementals.shape[0] - 1
        while (self.next_index < last and
               (_dist(pos, self.incrementals[self.next_index])
                <= self.cfg.arrival_tolerance
                or self._passed(pos, self.next_index))):
            self.next_index += 1
        if (self.next_index >= last and
                _dist(pos, self.incrementals[last]) <= self.cfg.arrival_tolerance):
            self.mode = Mode.COMPLETED
            events.append(("transition", "completed"))
            return StepResult(self.incrementals[last], 0.0, events, self.mode)
        wp = self.incrementals[self.next_index]
        offcourse = (self._lateral_deviation(pos)
                     > self.cfg.offcourse_threshold)
        if offcourse or not self._route_clear_ahead(local_map, pos):
            events.append(("transition", "avoiding:offcourse" if offcourse
                           else "avoiding:blocked"))
            self._enter_avoiding(local_map, pos, events)
            if self.mode == Mode.FAILED:
                return StepResult(wp, 0.0, events, self.mode)
            return StepResult(wp, self._brake_budget_on_path(local_map, pos),
                              events, self.mode)
        # track the mission line itself (aim a short lookahead past the
        # projection), so lateral overshoot damps out instead of turning
        # into wide arcs between waypoints
        setpoint = self._line_pursuit(pos)
        return StepResult(setpoint,
                          self._brake_budget_on_path(local_map, pos),
                          events, self.mode)

    def _route_clear_ahead(self, local_map, pos) -> bool:
        """Whether the mission line is free of sensed obstacles over the
        next few metres. Checking only the segment to the next waypoint
        (2 m at the default spacing) would let the vehicle keep cruising
        toward an obstacle it can already see; scanning a speed-scaled
        distance ahead starts the avoidance episode while there is still
        room to slow down and route around the blockage."""
        incr = self.incrementals
        i = self.next_index
        last = incr.shape[0] - 1
        a = pos
        remaining = max(4.0, 1.5 * self._speed)
        while remaining > 0.0:
            seg = min(remaining, _dist(a, incr[i]))
            if seg > 1e-12:
                frac = seg / _dist(a, incr[i])
                b = a + (incr[i] - a) * frac
                if not check_direct(local_map, a, b):
                    return False
                remaining -= seg
                a = b
            if i >= last:
                break
            i += 1
        return True

    def _lateral_deviation(self, pos) -> float:
        """Distance from pos to the mission segment currently being flown
        (a gust can push the vehicle off the line; past the slack
        threshold it re-routes back instead of cutting a long diagonal)."""
        a = self.incrementals[max(0, self.next_index - 1)]
        b = self.incrementals[self.next_index]
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0.0 else min(
            1.0, max(0.0, float((pos - a) @ ab) / denom))
        return _dist(pos, a + t * ab)

    def _passed(self, pos, index) -> bool:
        """Whether pos projects beyond incremental waypoint ``index`` on
        its approach segment."""
        a = self.incrementals[max(0, index - 1)]
        b = self.incrementals[index]
        ab = b - a
        denom = float(ab @ ab)
        if denom == 0.0:
            return False
        return float((pos - a) @ ab) / denom >= 1.0

    def _line_pursuit(self, pos):
        incr = self.incrementals
        i = self.next_index
        a, b = incr[i - 1], incr[i]
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0.0 else min(
            1.0, max(0.0, float((pos - a) @ ab) / denom))
        point = a + t * ab
        ahead = max(self.cfg.pursuit_lookahead,
                    self.cfg.pursuit_horizon * self._speed)
        last = incr.shape[0] - 1
        seg_rest = _dist(point, incr[i])
        while ahead > seg_rest and i < last:
            ahead -= seg_rest
            point = incr[i]
            i += 1
            seg_rest = _dist(point, incr[i])
        if seg_rest <= 1e-12 or ahead >= seg_rest:
            return incr[i].copy()
        return point + (incr[i] - point) * (ahead / seg_rest)

    def _brake_budget_on_path(self, local_map, pos) -> float:
        rest = [self.incrementals[i]
                for i in range(self.next_index, self.incrementals.shape[0])]
        remaining = path_length([pos] + rest)
        clear = free_distance_along(local_map, pos, rest, rim_blocks=True)
        return min(remaining, max(0.0, clear - self.cfg.brake_margin))

    # -- avoidance behaviour -----------------------------------------------

    def _target_start(self, pos) -> int:
        # pick up the mission line far enough ahead that reaching the
        # target never requires reversing: skip waypoints already passed
        # or closer than the pursuit reach at the current speed
        start = self.next_index
        last = self.incrementals.shape[0] - 1
        lead = (self.cfg.pursuit_lookahead
                + self.cfg.pursuit_horizon * self._speed)
        while start < last and (
                self._passed(pos, start)
                or _dist(pos, self.incrementals[start]) < lead):
            start += 1
        return start

    def _drop_path(self) -> None:
        # losing the path starts a fresh commitment window: single RRT*
        # draws scatter, and adopting the first one can commit the vehicle
        # to the wrong side of an obstacle, so gather a few draws and take
        # the shortest before following anything
        self.active_path = None
        self.candidate = None
        self.commit_countdown = self.cfg.commit_samples

    def _enter_avoiding(self, local_map, pos, events) -> None:
        sel = select_avoidance_target(local_map, self.incrementals,
                                      self._target_start(pos),
                                      self.cfg.lookahead_min)
        if sel is None:
            if not self._expand(events):
                return
            # window grows next tick; stay in avoiding with no target yet
            sel = None
        self.mode = Mode.AVOIDING
        self._drop_path()
        self.fail_streak = 0
        if sel is not None:
            self.avoid_target, self.resume_index = sel
            events.append(("avoid_target", self.resume_index))
        else:
            self.avoid_target, self.resume_index = None, None

    def _expand(self, events) -> bool:
        try:
            self.window_spec = maximize_map(self.window_spec)
        except ExpansionCeilingError:
            self.mode = Mode.FAILED
            self.fail_reason = "no_path"
            events.append(("transition", "failed:no_path"))
            return False
        self.expansions += 1
        events.append(("map_expanded", self.window_spec.d_corner))
        return True

    def _step_avoiding(self, local_map, pos, planner, events) -> StepResult:
        # retarget if the window grew without a target last tick
        if self.avoid_target is None:
            sel = select_avoidance_target(local_map, self.incrementals,
                                          self._target_start(pos),
                                          self.cfg.lookahead_min)
            if sel is None:
                if not self._expand(events):
                    return StepResult(pos, 0.0, events, self.mode)
                return StepResult(pos, 0.0, events, self.mode)
            self.avoid_target, self.resume_index = sel
            events.append(("avoid_target", self.resume_index))
        # arrival at the avoidance target resumes the mission path
        if _dist(pos, self.avoid_target) <= self.cfg.arrival_tolerance:
            self.next_index = min(self.resume_index + 1,
                                  self.incrementals.shape[0] - 1)
            if (self.resume_index >= self.incrementals.shape[0] - 1):
                self.mode = Mode.COMPLETED
                events.append(("transition", "completed"))
                return StepResult(self.incrementals[-1], 0.0, events, self.mode)
            self.mode = Mode.ON_PATH
            self._drop_path()
            self.avoid_target = None
            self.window_spec = self._base_spec
            events.append(("transition", "on_path"))
            return self._step_on_path(local_map, pos, events)
        # recovery: if the vehicle slid into an occupied cell, back out
        # first (the rim is a soft buffer and not worth retreating from).
        # Aim for the nearest clear cell — when fresh sensing inflates a
        # band under the vehicle its edge is usually a cell away, far
        # closer than the last remembered free position.
        if local_map.grid.state_at(pos) == CellState.OCCUPIED:
            tgt = _nearest_clear(local_map, pos)
            if tgt is None:
                tgt = self.last_free_pos
            if tgt is not None and _dist(pos, tgt) > 1e-9:
                events.append(("recovery", None))
                return StepResult(np.asarray(tgt, float).copy(),
                                  _dist(pos, tgt), events, self.mode)
        # drop an active path that new sensing has invalidated
        if self.active_path is not None:
            if not self._path_still_clear(local_map, pos):
                events.append(("path_invalidated", None))
                self._drop_path()
        result = planner(local_map, pos, self.avoid_target)
        if result.ok:
            events.append(("plan_success", result.path.length))
            self.fail_streak = 0
            if self.active_path is None:
                if (self.candidate is None
                        or result.path.length < self.candidate.length):
                    self.candidate = result.path
            else:
                cost = path_cost_current(pos, self.active_path, local_map,
                                         self.cfg.rim_weight)
                if accept_or_keep(cost, result.path):
                    self.active_path = [p for p in result.path.waypoints[1:]]
                    events.append(("plan_adopted", result.path.length))
        else:
            events.append(("plan_failed", result.status))
            if result.status == "goal_blocked":
                sel = select_avoidance_target(local_map, self.incrementals,
                                              self._target_start(pos),
                                              self.cfg.lookahead_min)
                if sel is not None:
                    self.avoid_target, self.resume_index = sel
                    self._drop_path()
                    events.append(("avoid_target", self.resume_index))
                elif not self._expand(events):
                    return StepResult(pos, 0.0, events, self.mode)
            elif self.active_path is None:
                self.fail_streak += 1
                if self.fail_streak >= self.cfg.replan_fail_limit:
                    self.fail_streak = 0
                    if not self._expand(events):
                        return StepResult(pos, 0.0, events, self.mode)
        if self.active_path is None:
            self.commit_countdown -= 1
            if self.candidate is not None and self.commit_countdown <= 0:
                self.active_path = [p for p in self.candidate.waypoints[1:]]
                events.append(("plan_adopted", self.candidate.length))
                self.candidate = None
            else:
                # no committed path yet: hold position while draws gather
                return StepResult(pos.copy(), 0.0, events, self.mode)
        smoothed = smooth([pos] + self.active_path, local_map)
        self.active_path = smoothed[1:]
        setpoint, remaining = self._pursuit(local_map, pos)
        clear = free_distance_along(local_map, pos, self.active_path,
                                    rim_blocks=False)
        budget = min(remaining, max(0.0, clear - self.cfg.brake_margin))
        return StepResult(setpoint, budget, events, self.mode)

    def _pursuit(self, local_map, pos):
        """Project onto the active path and aim a lookahead further along
        it, so the vehicle tracks the planned line instead of swinging
        wide arcs toward distant vertices. The lookahead shrinks until the
        aim point is collision-visible from the vehicle, otherwise it
        would cut corners straight into inflated cells. Returns
        (setpoint, remaining distance to the path end)."""
        path = self.active_path
        pts = [pos] + path
        best_d2, best_j, best_t = math.inf, 0, 0.0
        for j in range(len(pts) - 1):
            a, b = pts[j], pts[j + 1]
            ab = b - a
            denom = float(ab @ ab)
            t = 0.0 if denom == 0.0 else min(
                1.0, max(0.0, float((pos - a) @ ab) / denom))
            q = a + t * ab
            d2 = float((pos - q) @ (pos - q))
            if d2 < best_d2:
                best_d2, best_j, best_t = d2, j, t
        # waypoints behind the projection have been passed
        if best_j >= 2:
            del path[:best_j - 1]
            best_j = 1
        a = pos if best_j == 0 else path[0]
        b = path[0] if best_j == 0 else path[1]
        proj = a + best_t * (b - a)
        nxt = best_j            # index into path of the waypoint past proj
        remaining = (best_d2 ** 0.5 + _dist(proj, path[nxt])
                     + path_length(path[nxt:]))
        lookahead = max(self.cfg.pursuit_lookahead,
                        self.cfg.pursuit_horizon * self._speed)
        # prefer an aim point whose sight line stays off the rim: cutting
        # through the rim invites momentum overshoot into occupied cells
        own = local_map.grid.world_to_cell(pos)
        for rim_blocks in (True, False):
            ahead = lookahead
            for _ in range(5):
                sp = self._arc_point(proj, nxt, ahead)
                if local_map.grid.segment_query(
                        pos, sp, rim_blocks=rim_blocks,
                        exempt_cell=own) == 0:
                    return sp, remaining
                ahead *= 0.5
        return self._arc_point(proj, nxt, lookahead * 0.5 ** 4), remaining

    def _arc_point(self, proj, nxt, ahead):
        """Point ``ahead`` metres past ``proj`` along the active path,
        whose next waypoint is ``path[nxt]`` (clamped to the last one)."""
        path = self.active_path
        seg_rest = _dist(proj, path[nxt])
        while ahead > seg_rest and nxt < len(path) - 1:
            ahead -= seg_rest
            proj = path[nxt]
            nxt += 1
            seg_rest = _dist(proj, path[nxt])
        if seg_rest <= 1e-12 or ahead >= seg_rest:
            return path[nxt].copy()
        return proj + (path[nxt] - proj) * (ahead / seg_rest)

    def _path_still_clear(self, local_map, pos) -> bool:
        pts = [pos] + self.active_path
        for a, b in zip(pts[:-1], pts[1:]):
            state = local_map.grid.segment_query(a, b, rim_blocks=False)
            if state == 1:     # blocked by an occupied cell
                return False
        return True


def _nearest_clear(local_map: LocalMap, pos):
    """Centre of the nearest free or rim cell, or None if there is none."""
    g = local_map.grid
    mask = (g.cells == CellState.FREE) | (g.cells == CellState.OUTER_RIM)
    if not mask.any():
        return None
    iy, ix = np.nonzero(mask)
    cx = g.origin[0] + (ix + 0.5) * g.cell_size
    cy = g.origin[1] + (iy + 0.5) * g.cell_size
    k = int(np.argmin((cx - pos[0]) ** 2 + (cy - pos[1]) ** 2))
    return np.array([cx[k], cy[k]])


def _dist(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))
