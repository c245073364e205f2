"""Independent reference implementations used as test oracles.

Everything here is written from first principles against the documented
behaviour, deliberately sharing no code with the package: brute-force
Chebyshev inflation, segment/cell intersection by rectangle clipping,
8-connected Dijkstra on the cell lattice, and a brute-force braking
integration. Tests compare the package against these.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

UNKNOWN, FREE, RIM, OCCUPIED = 0, 1, 2, 3


def inflate_bruteforce(cells: np.ndarray, cell_size: float, d_safe: float,
                       rim_width: float) -> np.ndarray:
    """O(n * m) inflation: every cell within Chebyshev radius
    ceil(d_safe / cell_size) of an occupied cell becomes occupied, the ring
    out to ceil((d_safe + rim_width) / cell_size) becomes outer rim."""
    h, w = cells.shape
    r_occ = int(math.ceil(d_safe / cell_size))
    r_rim = int(math.ceil((d_safe + rim_width) / cell_size))
    out = cells.copy()
    occ = np.argwhere(cells == OCCUPIED)
    for radius, state in ((r_rim, RIM), (r_occ, OCCUPIED)):
        if radius == 0 and state == RIM:
            continue
        for iy, ix in occ:
            y0, y1 = max(0, iy - radius), min(h, iy + radius + 1)
            x0, x1 = max(0, ix - radius), min(w, ix + radius + 1)
            block = out[y0:y1, x0:x1]
            block[...] = np.where(block == OCCUPIED, block, state)
    # re-assert the original occupied cells (loop order already does, but
    # keep the intent explicit)
    out[cells == OCCUPIED] = OCCUPIED
    return out


def segment_intersects_cell(a, b, ix: int, iy: int, origin, cell_size: float,
                            eps: float = 1e-12) -> bool:
    """Whether segment a-b touches the closed square of cell (ix, iy).

    Liang-Barsky style parametric clip against the cell rectangle; a
    touched corner or edge counts, matching supercover semantics.
    """
    ax, ay = float(a[0]), float(a[1])
    dx, dy = float(b[0]) - ax, float(b[1]) - ay
    lo = (origin[0] + ix * cell_size, origin[1] + iy * cell_size)
    hi = (lo[0] + cell_size, lo[1] + cell_size)
    t0, t1 = 0.0, 1.0
    for p, d, lo_k, hi_k in ((ax, dx, lo[0], hi[0]), (ay, dy, lo[1], hi[1])):
        if abs(d) < eps:
            if p < lo_k - eps or p > hi_k + eps:
                return False
            continue
        ta, tb = (lo_k - p) / d, (hi_k - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1 + eps:
            return False
    return True


def cells_on_segment(a, b, origin, cell_size: float, width: int,
                     height: int) -> set[tuple[int, int]]:
    """All in-bounds cells whose closed square the segment touches."""
    xs = sorted((float(a[0]), float(b[0])))
    ys = sorted((float(a[1]), float(b[1])))
    ix0 = max(0, int(math.floor((xs[0] - origin[0]) / cell_size)) - 1)
    ix1 = min(width - 1, int(math.floor((xs[1] - origin[0]) / cell_size)) + 1)
    iy0 = max(0, int(math.floor((ys[0] - origin[1]) / cell_size)) - 1)
    iy1 = min(height - 1, int(math.floor((ys[1] - origin[1]) / cell_size)) + 1)
    found = set()
    for iy in range(iy0, iy1 + 1):
        for ix in range(ix0, ix1 + 1):
            if segment_intersects_cell(a, b, ix, iy, origin, cell_size):
                found.add((ix, iy))
    return found


def count_rim_cells_reference(path, cells: np.ndarray, origin,
                              cell_size: float) -> int:
    """Distinct rim cells touched by a polyline (out-of-grid parts
    ignored), via the rectangle-clip intersection test above."""
    h, w = cells.shape
    seen: set[tuple[int, int]] = set()
    pts = [np.asarray(p, float) for p in path]
    if len(pts) == 1:
        pts = pts * 2
    for a, b in zip(pts[:-1], pts[1:]):
        for c in cells_on_segment(a, b, origin, cell_size, w, h):
            if cells[c[1], c[0]] == RIM:
                seen.add(c)
    return len(seen)


def dijkstra_8(cells: np.ndarray, start: tuple[int, int],
               goal: tuple[int, int], cell_size: float = 1.0,
               blocked=(OCCUPIED,)) -> float:
    """Shortest 8-connected path length between cell centers, or inf.

    Diagonal moves cost sqrt(2) * cell_size and require both adjacent
    orthogonal cells to be passable (no corner cutting).
    """
    h, w = cells.shape
    passable = ~np.isin(cells, blocked)
    if not (passable[start[1], start[0]] and passable[goal[1], goal[0]]):
        return math.inf
    dist = np.full((h, w), math.inf)
    dist[start[1], start[0]] = 0.0
    heap = [(0.0, start)]
    moves = [(1, 0), (-1, 0), (0, 1), (0, -1),
             (1, 1), (1, -1), (-1, 1), (-1, -1)]
    while heap:
        d, (ix, iy) = heapq.heappop(heap)
        if (ix, iy) == goal:
            return d * cell_size
        if d > dist[iy, ix]:
            continue
        for mx, my in moves:
            nx, ny = ix + mx, iy + my
            if not (0 <= nx < w and 0 <= ny < h and passable[ny, nx]):
                continue
            if mx and my and not (passable[iy, nx] and passable[ny, ix]):
                continue
            nd = d + (math.sqrt(2.0) if mx and my else 1.0)
            if nd < dist[ny, nx]:
                dist[ny, nx] = nd
                heapq.heappush(heap, (nd, (nx, ny)))
    return math.inf


def braking_distance_numeric(v: float, jerk: float, a_max: float,
                             dt: float = 1e-5) -> float:
    """Integrate an ideal jerk-limited brake from speed v to rest.

    Deceleration ramps up at the jerk limit (capped at a_max) and ramps
    back down once the remaining speed equals a^2 / (2 j), the speed shed
    during the ramp-down, so speed and deceleration reach zero together.
    """
    speed, accel, dist = float(v), 0.0, 0.0
    while speed > 0.0:
        if speed <= accel * accel / (2.0 * jerk):
            accel = max(0.0, accel - jerk * dt)
        else:
            accel = min(a_max, accel + jerk * dt)
        new_speed = max(0.0, speed - accel * dt)
        dist += 0.5 * (speed + new_speed) * dt
        speed = new_speed
    return dist


def random_occupancy(rng: np.random.Generator, width: int, height: int,
                     density: float) -> np.ndarray:
    """Known-free lattice with i.i.d. occupied cells at the given density."""
    cells = np.full((height, width), FREE, dtype=np.uint8)
    cells[rng.random((height, width)) < density] = OCCUPIED
    return cells
