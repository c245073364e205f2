"""Compiled inner loops: supercover grid traversal and the RRT* growth loop.

Everything here operates on raw numpy arrays so numba can compile it; the
public wrappers live in ``grid`` and ``rrt_star``.
"""

import math

import numpy as np
from numba import njit

# cell codes (uint8 grid values)
CELL_UNKNOWN = 0
CELL_FREE = 1
CELL_RIM = 2
CELL_OCCUPIED = 3

# segment query results
SEG_FREE = 0
SEG_BLOCKED = 1
SEG_OOB = 2

# planner status codes
PLAN_SUCCESS = 0
PLAN_BUDGET_EXHAUSTED = 1
PLAN_MAP_SATURATED = 2
PLAN_GOAL_BLOCKED = 3

# two simultaneous gridline crossings closer than this count as one corner
_CORNER_EPS = 1e-12


@njit(cache=True)
def supercover_cells(ox, oy, cs, width, height, ax, ay, bx, by):
    """Every cell touched by segment a-b, in traversal order.

    Conservative: an exact corner crossing contributes both side cells.
    Returns (count, cells) where cells is (n, 2) of (ix, iy); count is -1
    when either endpoint lies outside the grid.
    """
    gax = (ax - ox) / cs
    gay = (ay - oy) / cs
    gbx = (bx - ox) / cs
    gby = (by - oy) / cs
    ix = int(math.floor(gax))
    iy = int(math.floor(gay))
    jx = int(math.floor(gbx))
    jy = int(math.floor(gby))
    cap = 3 * (abs(jx - ix) + abs(jy - iy)) + 8
    out = np.empty((cap, 2), np.int64)
    if (ix < 0 or ix >= width or iy < 0 or iy >= height
            or jx < 0 or jx >= width or jy < 0 or jy >= height):
        return -1, out
    n = 0
    out[n, 0] = ix
    out[n, 1] = iy
    n += 1
    dx = gbx - gax
    dy = gby - gay
    sx = 1 if dx > 0.0 else -1
    sy = 1 if dy > 0.0 else -1
    if dx != 0.0:
        t_dx = abs(1.0 / dx)
        edge = ix + 1 if sx > 0 else ix
        t_x = (edge - gax) / dx
    else:
        t_dx = np.inf
        t_x = np.inf
    if dy != 0.0:
        t_dy = abs(1.0 / dy)
        edge = iy + 1 if sy > 0 else iy
        t_y = (edge - gay) / dy
    else:
        t_dy = np.inf
        t_y = np.inf
    while ix != jx or iy != jy:
        # an axis that already reached its endpoint cell can only produce
        # rounding-artifact crossings, so freeze it
        move_x = ix != jx
        move_y = iy != jy
        eff_x = t_x if move_x else np.inf
        eff_y = t_y if move_y else np.inf
        if move_x and move_y and abs(t_x - t_y) < _CORNER_EPS:
            out[n, 0] = ix + sx
            out[n, 1] = iy
            n += 1
            out[n, 0] = ix
            out[n, 1] = iy + sy
            n += 1
            ix += sx
            iy += sy
            t_x += t_dx
            t_y += t_dy
        elif eff_x < eff_y:
            ix += sx
            t_x += t_dx
        else:
            iy += sy
            t_y += t_dy
        out[n, 0] = ix
        out[n, 1] = iy
        n += 1
        if n >= cap - 3:
            break
    return n, out


@njit(cache=True)
def segment_state(cells, ox, oy, cs, ax, ay, bx, by, rim_blocks, ex_ix,
                  ex_iy, unknown_blocks=False):
    """Classify segment a-b against the grid without allocating.

    Same traversal as supercover_cells; (ex_ix, ex_iy) is a single cell
    exempt from blocking (the vehicle's own cell), -1 to disable.
    """
    height, width = cells.shape
    gax = (ax - ox) / cs
    gay = (ay - oy) / cs
    gbx = (bx - ox) / cs
    gby = (by - oy) / cs
    ix = int(math.floor(gax))
    iy = int(math.floor(gay))
    jx = int(math.floor(gbx))
    jy = int(math.floor(gby))
    if (ix < 0 or ix >= width or iy < 0 or iy >= height
            or jx < 0 or jx >= width or jy < 0 or jy >= height):
        return SEG_OOB
    v = cells[iy, ix]
    if (ix != ex_ix or iy != ex_iy) and (
            v == CELL_OCCUPIED or (rim_blocks and v == CELL_RIM)
            or (unknown_blocks and v == CELL_UNKNOWN)):
        return SEG_BLOCKED
    dx = gbx - gax
    dy = gby - gay
    sx = 1 if dx > 0.0 else -1
    sy = 1 if dy > 0.0 else -1
    if dx != 0.0:
        t_dx = abs(1.0 / dx)
        edge = ix + 1 if sx > 0 else ix
        t_x = (edge - gax) / dx
    else:
        t_dx = np.inf
        t_x = np.inf
    if dy != 0.0:
        t_dy = abs(1.0 / dy)
        edge = iy + 1 if sy > 0 else iy
        t_y = (edge - gay) / dy
    else:
        t_dy = np.inf
        t_y = np.inf
    guard = 3 * (abs(jx - ix) + abs(jy - iy)) + 8
    steps = 0
    while ix != jx or iy != jy:
        move_x = ix != jx
        move_y = iy != jy
        eff_x = t_x if move_x else np.inf
        eff_y = t_y if move_y else np.inf
        if move_x and move_y and abs(t_x - t_y) < _CORNER_EPS:
            v = cells[iy, ix + sx]
            if (ix + sx != ex_ix or iy != ex_iy) and (
                    v == CELL_OCCUPIED or (rim_blocks and v == CELL_RIM)
            or (unknown_blocks and v == CELL_UNKNOWN)):
                return SEG_BLOCKED
            v = cells[iy + sy, ix]
            if (ix != ex_ix or iy + sy != ex_iy) and (
                    v == CELL_OCCUPIED or (rim_blocks and v == CELL_RIM)
            or (unknown_blocks and v == CELL_UNKNOWN)):
                return SEG_BLOCKED
            ix += sx
            iy += sy
            t_x += t_dx
            t_y += t_dy
        elif eff_x < eff_y:
            ix += sx
            t_x += t_dx
        else:
            iy += sy
            t_y += t_dy
        v = cells[iy, ix]
        if (ix != ex_ix or iy != ex_iy) and (
                v == CELL_OCCUPIED or (rim_blocks and v == CELL_RIM)
            or (unknown_blocks and v == CELL_UNKNOWN)):
            return SEG_BLOCKED
        steps += 1
        if steps >= guard:
            break
    return SEG_FREE


@njit(cache=True)
def plan_kernel(cells, ox, oy, cs, start_x, start_y, goal_x, goal_y,
                max_iter, path_res, goal_bias, fixed_radius, gamma,
                radius_cap, goal_tol, seed, reject_limit):
    """Grow one RRT* tree over the grid and return the raw tree arrays.

    Returns (status, xs, ys, parent, cost, can_goal, best_goal_node).
    can_goal marks nodes with a verified free closing segment to the goal;
    the start cell is exempt from blocking so a vehicle sitting on the rim
    can still plan its way out.
    """
    height, width = cells.shape
    np.random.seed(seed)
    xmin = ox
    ymin = oy
    xmax = ox + width * cs
    ymax = oy + height * cs
    ex_ix = int(math.floor((start_x - ox) / cs))
    ex_iy = int(math.floor((start_y - oy) / cs))
    cap = max_iter + 1
    xs = np.empty(cap)
    ys = np.empty(cap)
    parent = np.full(cap, -1, np.int64)
    cost = np.zeros(cap)
    can_goal = np.zeros(cap, np.bool_)
    near_buf = np.empty(cap, np.int64)
    stack = np.empty(cap, np.int64)
    xs[0] = start_x
    ys[0] = start_y
    n = 1
    if math.hypot(goal_x - start_x, goal_y - start_y) <= goal_tol:
        if segment_state(cells, ox, oy, cs, start_x, start_y, goal_x, goal_y,
                         True, ex_ix, ex_iy) == SEG_FREE:
            can_goal[0] = True
    for _ in range(max_iter):
        # sample (goal-biased, rejection-sampled out of occupied cells)
        if np.random.random() < goal_bias:
            rx = goal_x
            ry = goal_y
        else:
            found = False
            rx = 0.0
            ry = 0.0
            for _r in range(reject_limit):
                rx = xmin + np.random.random() * (xmax - xmin)
                ry = ymin + np.random.random() * (ymax - ymin)
                cix = int(math.floor((rx - ox) / cs))
                ciy = int(math.floor((ry - oy) / cs))
                if 0 <= cix < width and 0 <= ciy < height:
                    if cells[ciy, cix] != CELL_OCCUPIED:
                        found = True
                        break
            if not found:
                return (PLAN_MAP_SATURATED, xs[:n], ys[:n], parent[:n],
                        cost[:n], can_goal[:n], -1)
        # nearest (ties fall to the lowest index)
        bi = 0
        bd2 = (xs[0] - rx) ** 2 + (ys[0] - ry) ** 2
        for i in range(1, n):
            d2 = (xs[i] - rx) ** 2 + (ys[i] - ry) ** 2
            if d2 < bd2:
                bd2 = d2
                bi = i
        if bd2 <= 1e-24:
            continue
        d = math.sqrt(bd2)
        # steer
        step = path_res if path_res < d else d
        nx = xs[bi] + (rx - xs[bi]) * step / d
        ny = ys[bi] + (ry - ys[bi]) * step / d
        # shrinking-ball near set
        if fixed_radius > 0.0:
            r = fixed_radius
        else:
            r = gamma * math.sqrt(math.log(n) / n) if n > 1 else 0.0
            if r > radius_cap:
                r = radius_cap
        r2 = r * r
        m = 0
        for i in range(n):
            if (xs[i] - nx) ** 2 + (ys[i] - ny) ** 2 <= r2:
                near_buf[m] = i
                m += 1
        # choose parent by total path length
        bp = -1
        bc = np.inf
        if m == 0:
            if segment_state(cells, ox, oy, cs, xs[bi], ys[bi], nx, ny,
                             True, ex_ix, ex_iy) == SEG_FREE:
                bp = bi
                bc = cost[bi] + step
        else:
            for k in range(m):
                i = near_buf[k]
                c = cost[i] + math.hypot(xs[i] - nx, ys[i] - ny)
                if c < bc:
                    if segment_state(cells, ox, oy, cs, xs[i], ys[i], nx, ny,
                                     True, ex_ix, ex_iy) == SEG_FREE:
                        bp = i
                        bc = c
        if bp < 0:
            continue
        idx = n
        xs[idx] = nx
        ys[idx] = ny
        parent[idx] = bp
        cost[idx] = bc
        n += 1
        gd = math.hypot(goal_x - nx, goal_y - ny)
        if gd <= goal_tol:
            if segment_state(cells, ox, oy, cs, nx, ny, goal_x, goal_y,
                             True, ex_ix, ex_iy) == SEG_FREE:
                can_goal[idx] = True
        # rewire neighbours through the new node
        for k in range(m):
            cnd = near_buf[k]
            if cnd == bp:
                continue
            alt = bc + math.hypot(xs[cnd] - nx, ys[cnd] - ny)
            if alt < cost[cnd] - 1e-12:
                if segment_state(cells, ox, oy, cs, nx, ny, xs[cnd], ys[cnd],
                                 True, ex_ix, ex_iy) == SEG_FREE:
                    delta = cost[cnd] - alt
                    parent[cnd] = idx
                    cost[cnd] = alt
                    sp = 0
                    stack[sp] = cnd
                    sp += 1
                    while sp > 0:
                        sp -= 1
                        cur = stack[sp]
                        for z in range(n):
                            if parent[z] == cur and z != cur:
                                cost[z] -= delta
                                stack[sp] = z
                                sp += 1
    best = np.inf
    bi_goal = -1
    for i in range(n):
        if can_goal[i]:
            t = cost[i] + math.hypot(goal_x - xs[i], goal_y - ys[i])
            if t < best:
                best = t
                bi_goal = i
    status = PLAN_SUCCESS if bi_goal >= 0 else PLAN_BUDGET_EXHAUSTED
    return status, xs[:n], ys[:n], parent[:n], cost[:n], can_goal[:n], bi_goal
