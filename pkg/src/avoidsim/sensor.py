"""Forward-facing depth camera simulated as a planar ray fan."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import WorldModel
from .grid import CellState, OccupancyGrid


@dataclass
class SensorConfig:
    fov_deg: float = 87.0          # D435 horizontal field of view
    range: float = 10.0
    ray_count: int = 128
    mount_yaw: float = 0.0
    noise_sigma: float = 0.0       # optional Gaussian range noise

    def __post_init__(self):
        if not 0.0 < self.fov_deg <= 180.0:
            raise ValueError("fov must lie in (0, 180] degrees")
        if self.range <= 0.0:
            raise ValueError("sensor range must be positive")
        if self.ray_count < 2:
            raise ValueError("need at least 2 rays")


@dataclass
class Scan:
    hits: np.ndarray               # (n, 2) world points
    timestamp: float = 0.0
    origin: np.ndarray | None = None
    endpoints: np.ndarray | None = None   # (r, 2) hit point or range limit
    hit_mask: np.ndarray | None = None    # (r,) ray ended on an obstacle


def scan(world: WorldModel, position, heading: float, cfg: SensorConfig,
         rng: np.random.Generator | None = None,
         timestamp: float = 0.0) -> Scan:
    """Cast the ray fan against the world and report nearest hits.

    Rays span [heading - fov/2, heading + fov/2] evenly; each reports the
    closest obstacle-edge intersection within range, or nothing.
    """
    o = np.asarray(position, dtype=float)
    half = math.radians(cfg.fov_deg) / 2.0
    angles = heading + cfg.mount_yaw + np.linspace(-half, half, cfg.ray_count)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)   # (r, 2)
    e0, e1 = world.edge_arrays()                                # (m, 2)
    if e0.shape[0] == 0:
        return Scan(hits=np.empty((0, 2)), timestamp=timestamp,
                    origin=o.copy(),
                    endpoints=o[None, :] + cfg.range * dirs,
                    hit_mask=np.zeros(cfg.ray_count, dtype=bool))
    v = e1 - e0                                                 # (m, 2)
    w = e0 - o                                                  # (m, 2)
    denom = dirs[:, 0:1] * v[None, :, 1] - dirs[:, 1:2] * v[None, :, 0]
    cross_wv = w[:, 0] * v[:, 1] - w[:, 1] * v[:, 0]            # (m,)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross_wv[None, :] / denom                           # (r, m)
        u = (w[None, :, 0] * dirs[:, 1:2] - w[None, :, 1] * dirs[:, 0:1]) / denom
    eps = 1e-12
    valid = (np.abs(denom) > eps) & (u >= -eps) & (u <= 1.0 + eps) & (t > eps)
    t = np.where(valid, t, np.inf)
    t_hit = t.min(axis=1)                                       # (r,)
    if rng is not None and cfg.noise_sigma > 0.0:
        noise = rng.normal(0.0, cfg.noise_sigma, size=t_hit.shape)
        t_hit = np.where(np.isfinite(t_hit),
                         np.clip(t_hit + noise, 0.0, None), t_hit)
    mask = t_hit <= cfg.range
    hits = o[None, :] + t_hit[mask, None] * dirs[mask]
    t_end = np.minimum(t_hit, cfg.range)
    return Scan(hits=hits, timestamp=timestamp, origin=o.copy(),
                endpoints=o[None, :] + t_end[:, None] * dirs,
                hit_mask=mask)


def integrate_scan(grid: OccupancyGrid, s: Scan) -> int:
    """Carve free space along each ray, then mark every hit occupied.

    Cells are upgraded unknown -> free only (occupied marks are sticky);
    the cell containing a hit stays for the occupied mark. Returns how
    many cells changed state. Hits outside the grid are counted on
    grid.skipped_marks and skipped.
    """
    changed = 0
    if s.origin is not None and s.endpoints is not None:
        delta = s.endpoints - s.origin[None, :]
        length = np.hypot(delta[:, 0], delta[:, 1])             # (r,)
        # stop freeing half a cell short of a hit so the face cell is
        # left to the occupied mark
        free_len = np.where(s.hit_mask, length - grid.cell_size / 2.0,
                            length)
        step = grid.cell_size / 2.0
        n = max(1, int(math.ceil(float(length.max(initial=0.0)) / step)))
        frac = np.linspace(0.0, 1.0, n + 1)                     # (k,)
        px = s.origin[0] + np.outer(delta[:, 0], frac)          # (r, k)
        py = s.origin[1] + np.outer(delta[:, 1], frac)
        within = frac[None, :] * length[:, None] <= free_len[:, None]
        ix = np.floor((px - grid.origin[0]) / grid.cell_size).astype(np.int64)
        iy = np.floor((py - grid.origin[1]) / grid.cell_size).astype(np.int64)
        ok = (within & (ix >= 0) & (ix < grid.width) &
              (iy >= 0) & (iy < grid.height))
        sel_ix, sel_iy = ix[ok], iy[ok]
        unknown = grid.cells[sel_iy, sel_ix] == CellState.UNKNOWN
        if unknown.any():
            grid.cells[sel_iy[unknown], sel_ix[unknown]] = CellState.FREE
            flat = sel_iy[unknown] * grid.width + sel_ix[unknown]
            changed += int(np.unique(flat).size)
            grid.revision += 1
    for hit in s.hits:
        if grid.mark_occupied(hit):
            changed += 1
    return changed
