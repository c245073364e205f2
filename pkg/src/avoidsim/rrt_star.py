"""RRT* planner over a local map: bounded steering, near-radius parent
selection, rewiring with cost propagation, and goal biasing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .grid import CellState
from .local_window import LocalMap

SAMPLE_REJECT_LIMIT = 10_000

_STATUS_NAMES = {
    kernels.PLAN_SUCCESS: "success",
    kernels.PLAN_BUDGET_EXHAUSTED: "budget_exhausted",
    kernels.PLAN_MAP_SATURATED: "map_saturated",
    kernels.PLAN_GOAL_BLOCKED: "goal_blocked",
}


class PlannerError(RuntimeError):
    pass


@dataclass
class PlannerConfig:
    max_iterations: int = 2000
    path_resolution: float = 1.0
    goal_bias: float = 0.1
    near_radius: float | str = "auto"   # metres, or "auto" for shrinking ball
    radius_cap_factor: float = 3.0
    goal_tolerance: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 <= self.goal_bias < 1.0:
            raise ValueError("goal_bias must lie in [0, 1)")
        if self.path_resolution <= 0:
            raise ValueError("path_resolution must be positive")

    @property
    def gamma(self) -> float:
        """Shrinking-ball scale, pinned so the radius at 100 nodes equals
        radius_cap_factor * path_resolution."""
        return (self.radius_cap_factor * self.path_resolution
                / math.sqrt(math.log(100.0) / 100.0))

    def radius_for(self, n: int) -> float:
        if self.near_radius != "auto":
            return float(self.near_radius)
        cap = self.radius_cap_factor * self.path_resolution
        if n <= 1:
            return 0.0
        return min(self.gamma * math.sqrt(math.log(n) / n), cap)


@dataclass
class Tree:
    """Flat array view of the search tree (root at index 0, cost 0)."""

    positions: np.ndarray          # (n, 2)
    parents: np.ndarray            # (n,), -1 for the root
    costs: np.ndarray              # (n,) path length from root

    @classmethod
    def rooted_at(cls, position) -> "Tree":
        return cls(positions=np.asarray([position], dtype=float),
                   parents=np.array([-1], dtype=np.int64),
                   costs=np.zeros(1))

    def __len__(self) -> int:
        return self.positions.shape[0]

    def add(self, position, parent: int, cost: float) -> int:
        self.positions = np.vstack([self.positions, np.asarray(position, float)])
        self.parents = np.append(self.parents, np.int64(parent))
        self.costs = np.append(self.costs, float(cost))
        return len(self) - 1


@dataclass
class PlannedPath:
    waypoints: np.ndarray          # (n, 2) start .. goal
    length: float

    @classmethod
    def from_points(cls, points) -> "PlannedPath":
        pts = np.asarray(points, dtype=float)
        return cls(waypoints=pts, length=path_length(pts))


@dataclass
class PlanResult:
    status: str                    # success | budget_exhausted | map_saturated | goal_blocked
    path: PlannedPath | None = None
    tree: Tree | None = None
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "success"


# -- individual operations (also used directly by tests) -------------------

def sample_free(local_map: LocalMap, goal, cfg: PlannerConfig,
                rng: np.random.Generator):
    """Goal with probability goal_bias, else a uniform window point whose
    cell is not occupied (outer rim allowed; edges reject rim instead)."""
    if rng.random() < cfg.goal_bias:
        return np.asarray(goal, dtype=float)
    xmin, ymin, xmax, ymax = local_map.grid.extent
    for _ in range(SAMPLE_REJECT_LIMIT):
        p = np.array([rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)])
        if local_map.grid.state_at(p) != CellState.OCCUPIED:
            return p
    raise PlannerError("sampling rejected 10^4 points: map saturated")


def nearest(tree: Tree, p) -> int:
    """Index of the closest node; ties break to the lowest index."""
    d2 = np.sum((tree.positions - np.asarray(p, float)) ** 2, axis=1)
    return int(np.argmin(d2))


def steer(from_p, to_p, path_resolution: float) -> np.ndarray:
    """Point on from->to at distance min(path_resolution, |to - from|)."""
    a = np.asarray(from_p, float)
    b = np.asarray(to_p, float)
    d = float(np.hypot(*(b - a)))
    if d == 0.0:
        raise ValueError("cannot steer between coincident points")
    return a + (b - a) * min(path_resolution, d) / d


def near_nodes(tree: Tree, p, radius: float) -> list[int]:
    """All node indices within radius of p (ascending index order)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    d2 = np.sum((tree.positions - np.asarray(p, float)) ** 2, axis=1)
    return [int(i) for i in np.nonzero(d2 <= radius * radius)[0]]


def choose_parent(tree: Tree, local_map: LocalMap, candidates, p,
                  start_cell=None):
    """Lowest-total-cost candidate with a free connection to p, or None."""
    p = np.asarray(p, float)
    best = None
    best_cost = math.inf
    for i in candidates:
        c = tree.costs[i] + float(np.hypot(*(p - tree.positions[i])))
        if c < best_cost and local_map.grid.is_segment_free(
                tree.positions[i], p, rim_blocks=True, exempt_cell=start_cell):
            best = int(i)
            best_cost = c
    if best is None:
        return None
    return best, best_cost


def rewire(tree: Tree, local_map: LocalMap, new_index: int, candidates,
           start_cell=None) -> Tree:
    """Reparent candidates through the new node wherever that shortens their
    root path; the saving propagates to each reparented subtree."""
    p = tree.positions[new_index]
    base = tree.costs[new_index]
    for c in candidates:
        if c == new_index or c == tree.parents[new_index]:
            continue
        alt = base + float(np.hypot(*(tree.positions[c] - p)))
        if alt < tree.costs[c] - 1e-12 and local_map.grid.is_segment_free(
                p, tree.positions[c], rim_blocks=True, exempt_cell=start_cell):
            delta = tree.costs[c] - alt
            tree.parents[c] = new_index
            tree.costs[c] = alt
            stack = [int(c)]
            while stack:
                cur = stack.pop()
                for z in np.nonzero(tree.parents == cur)[0]:
                    if z != cur:
                        tree.costs[z] -= delta
                        stack.append(int(z))
    return tree


def path_length(points) -> float:
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    return float(np.sum(np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))))


# -- full planning loop ----------------------------------------------------

def plan(local_map: LocalMap, start, goal, cfg: PlannerConfig) -> PlanResult:
    """Run the sample/nearest/steer/choose-parent/rewire loop and return the
    best path found within the iteration budget (anytime behaviour)."""
    g = local_map.grid
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    start_state = g.state_at(start)
    goal_state = g.state_at(goal)
    if goal_state is None or goal_state == CellState.OCCUPIED:
        return PlanResult(status="goal_blocked")
    if start_state is None:
        return PlanResult(status="goal_blocked")
    fixed_radius = -1.0 if cfg.near_radius == "auto" else float(cfg.near_radius)
    status, xs, ys, parents, costs, can_goal, best = kernels.plan_kernel(
        g.cells, g.origin[0], g.origin[1], g.cell_size,
        float(start[0]), float(start[1]), float(goal[0]), float(goal[1]),
        cfg.max_iterations, cfg.path_resolution, cfg.goal_bias,
        fixed_radius, cfg.gamma, cfg.radius_cap_factor * cfg.path_resolution,
        cfg.goal_tolerance, cfg.seed, SAMPLE_REJECT_LIMIT)
    tree = Tree(positions=np.stack([xs, ys], axis=1),
                parents=np.asarray(parents), costs=np.asarray(costs))
    name = _STATUS_NAMES[int(status)]
    if name != "success":
        return PlanResult(status=name, tree=tree, iterations=cfg.max_iterations)
    chain = []
    i = int(best)
    while i >= 0:
        chain.append(tree.positions[i])
        i = int(tree.parents[i])
    chain.reverse()
    if float(np.hypot(*(goal - chain[-1]))) > 1e-12:
        chain.append(goal)
    return PlanResult(status="success",
                      path=PlannedPath.from_points(np.asarray(chain)),
                      tree=tree, iterations=cfg.max_iterations)
