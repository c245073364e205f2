"""The local planning window: contains vehicle and target with a corner
margin, carved out of the global grid and inflated on extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import OccupancyGrid, GridError


class WindowError(ValueError):
    pass


class ExpansionCeilingError(WindowError):
    """Raised when the window may not be enlarged any further; the mission
    turns this into a failed run instead of planning forever."""


@dataclass(frozen=True)
class WindowSpec:
    d_corner: float = 4.0
    d_safe: float = 3.0
    expansion_step: float = 5.0
    expansion_ceiling: int = 6
    expansion_count: int = 0

    def __post_init__(self):
        if self.d_corner < self.d_safe:
            raise WindowError("d_corner must be at least d_safe")
        if self.expansion_step <= 0:
            raise WindowError("expansion_step must be positive")


@dataclass
class LocalMap:
    grid: OccupancyGrid
    window: tuple[float, float, float, float]
    source_revision: int = 0
    d_safe: float = 0.0


def compute_window(drone, target, d_corner: float):
    """Axis-aligned box around {drone, target} expanded by d_corner."""
    if d_corner <= 0:
        raise WindowError("d_corner must be positive")
    dx, dy = float(drone[0]), float(drone[1])
    tx, ty = float(target[0]), float(target[1])
    return (min(dx, tx) - d_corner, min(dy, ty) - d_corner,
            max(dx, tx) + d_corner, max(dy, ty) + d_corner)


def extract_local_map(global_grid: OccupancyGrid, window,
                      d_safe: float, rim_width: float) -> LocalMap:
    """Copy the window's cells out of the global grid and inflate them.

    The window snaps outward to whole-cell boundaries so the local lattice
    stays aligned with the global one; only occupied cells inside the window
    are inflated, which is why d_corner must be at least d_safe.
    """
    ox, oy = global_grid.origin
    cs = global_grid.cell_size
    i0 = int(math.floor((window[0] - ox) / cs))
    j0 = int(math.floor((window[1] - oy) / cs))
    i1 = int(math.ceil((window[2] - ox) / cs))
    j1 = int(math.ceil((window[3] - oy) / cs))
    i0 = max(0, i0)
    j0 = max(0, j0)
    i1 = min(global_grid.width, i1)
    j1 = min(global_grid.height, j1)
    if i1 <= i0 or j1 <= j0:
        raise WindowError("window does not overlap the global grid")
    sub = OccupancyGrid(origin=(ox + i0 * cs, oy + j0 * cs), cell_size=cs,
                        width=i1 - i0, height=j1 - j0,
                        cells=global_grid.cells[j0:j1, i0:i1].copy(),
                        rim_value=global_grid.rim_value)
    inflated = sub.inflate(d_safe, rim_width)
    return LocalMap(grid=inflated, window=tuple(float(w) for w in window),
                    source_revision=global_grid.revision, d_safe=d_safe)


def maximize_map(spec: WindowSpec) -> WindowSpec:
    """Grow the corner margin by one expansion step."""
    if spec.expansion_count >= spec.expansion_ceiling:
        raise ExpansionCeilingError(
            f"window expansion ceiling ({spec.expansion_ceiling}) reached")
    return replace(spec, d_corner=spec.d_corner + spec.expansion_step,
                   expansion_count=spec.expansion_count + 1)
