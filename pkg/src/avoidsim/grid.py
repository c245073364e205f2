"""2D occupancy grid: cell states, square inflation with an outer rim, and
supercover segment queries used by every other module."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy import ndimage

from . import kernels


class CellState(IntEnum):
    UNKNOWN = kernels.CELL_UNKNOWN
    FREE = kernels.CELL_FREE
    OUTER_RIM = kernels.CELL_RIM
    OCCUPIED = kernels.CELL_OCCUPIED


# PGM grey levels for snapshot export
_PGM_LEVELS = {
    CellState.OCCUPIED: 0,
    CellState.OUTER_RIM: 128,
    CellState.UNKNOWN: 200,
    CellState.FREE: 255,
}


class GridError(ValueError):
    pass


class OutOfBoundsError(GridError):
    pass


@dataclass
class OccupancyGrid:
    """Dense row-major cell lattice; ``cells[iy, ix]`` holds a CellState code.

    ``origin`` is the world position of the corner of cell (0, 0);
    ``rim_value`` is the occupancy probability assigned to outer-rim cells,
    strictly between free (0.0) and occupied (1.0).
    """

    origin: tuple[float, float]
    cell_size: float
    width: int
    height: int
    cells: np.ndarray | None = None
    rim_value: float = 0.5
    skipped_marks: int = 0
    revision: int = 0

    def __post_init__(self):
        if self.cell_size <= 0:
            raise GridError("cell_size must be positive")
        if self.width < 1 or self.height < 1:
            raise GridError("grid needs at least one cell")
        if not 0.0 < self.rim_value < 1.0:
            raise GridError("rim_value must lie strictly between 0 and 1")
        if self.cells is None:
            self.cells = np.full((self.height, self.width),
                                 CellState.UNKNOWN, dtype=np.uint8)
        else:
            self.cells = np.asarray(self.cells, dtype=np.uint8)
            if self.cells.shape != (self.height, self.width):
                raise GridError("cells shape does not match width/height")
        self.origin = (float(self.origin[0]), float(self.origin[1]))

    @classmethod
    def from_bounds(cls, xmin, ymin, xmax, ymax, cell_size,
                    fill=CellState.UNKNOWN, rim_value=0.5) -> "OccupancyGrid":
        width = max(1, int(math.ceil((xmax - xmin) / cell_size)))
        height = max(1, int(math.ceil((ymax - ymin) / cell_size)))
        cells = np.full((height, width), fill, dtype=np.uint8)
        return cls(origin=(xmin, ymin), cell_size=cell_size,
                   width=width, height=height, cells=cells,
                   rim_value=rim_value)

    # -- coordinate mapping ------------------------------------------------

    @property
    def extent(self) -> tuple[float, float, float, float]:
        ox, oy = self.origin
        return (ox, oy,
                ox + self.width * self.cell_size,
                oy + self.height * self.cell_size)

    def world_to_cell(self, p) -> tuple[int, int] | None:
        """Containing cell of world point p, or None when out of bounds."""
        ix = math.floor((p[0] - self.origin[0]) / self.cell_size)
        iy = math.floor((p[1] - self.origin[1]) / self.cell_size)
        if 0 <= ix < self.width and 0 <= iy < self.height:
            return int(ix), int(iy)
        return None

    def cell_to_world(self, ix: int, iy: int) -> tuple[float, float]:
        """World coordinates of the cell center."""
        return (self.origin[0] + (ix + 0.5) * self.cell_size,
                self.origin[1] + (iy + 0.5) * self.cell_size)

    def state_at(self, p) -> CellState | None:
        c = self.world_to_cell(p)
        if c is None:
            return None
        return CellState(self.cells[c[1], c[0]])

    # -- mutation ----------------------------------------------------------

    def mark_occupied(self, p) -> bool:
        """Mark the containing cell occupied; out-of-bounds points are
        counted and skipped. Returns True when the grid changed."""
        c = self.world_to_cell(p)
        if c is None:
            self.skipped_marks += 1
            return False
        if self.cells[c[1], c[0]] != CellState.OCCUPIED:
            self.cells[c[1], c[0]] = CellState.OCCUPIED
            self.revision += 1
            return True
        return False

    # -- inflation ---------------------------------------------------------

    def inflate(self, d_safe: float, rim_width: float) -> "OccupancyGrid":
        """New grid with every occupied cell grown by the square (Chebyshev)
        safety radius, surrounded by a reduced-probability outer rim."""
        if d_safe < 0 or rim_width < 0:
            raise GridError("d_safe and rim_width must be non-negative")
        r_occ = int(math.ceil(d_safe / self.cell_size))
        r_rim = int(math.ceil((d_safe + rim_width) / self.cell_size))
        occ = self.cells == CellState.OCCUPIED
        out = self.cells.copy()
        if occ.any():
            if r_occ > 0:
                grown = ndimage.maximum_filter(
                    occ.astype(np.uint8), size=2 * r_occ + 1, mode="constant")
                grown = grown.astype(bool)
            else:
                grown = occ
            if r_rim > r_occ:
                rim = ndimage.maximum_filter(
                    occ.astype(np.uint8), size=2 * r_rim + 1, mode="constant")
                rim = rim.astype(bool) & ~grown
            else:
                rim = np.zeros_like(grown)
            out[grown] = CellState.OCCUPIED
            out[rim] = CellState.OUTER_RIM
        return OccupancyGrid(origin=self.origin, cell_size=self.cell_size,
                             width=self.width, height=self.height,
                             cells=out, rim_value=self.rim_value)

    # -- segment queries ---------------------------------------------------

    def supercover_cells(self, a, b) -> list[tuple[int, int]]:
        """All cells touched by segment a-b; raises when an endpoint is out
        of bounds."""
        n, cells = kernels.supercover_cells(
            self.origin[0], self.origin[1], self.cell_size,
            self.width, self.height,
            float(a[0]), float(a[1]), float(b[0]), float(b[1]))
        if n < 0:
            raise OutOfBoundsError(f"segment endpoint outside grid: {a} -> {b}")
        return [(int(cells[i, 0]), int(cells[i, 1])) for i in range(n)]

    def is_segment_free(self, a, b, rim_blocks: bool = True,
                        exempt_cell: tuple[int, int] | None = None,
                        unknown_blocks: bool = False) -> bool:
        """True iff no traversed cell is occupied (nor rim, when rim_blocks;
        nor unknown, when unknown_blocks).

        Unknown cells count as traversable by default; an out-of-bounds
        endpoint yields False (see segment_query for the distinct error
        signal)."""
        return self.segment_query(
            a, b, rim_blocks, exempt_cell, unknown_blocks) == kernels.SEG_FREE

    def segment_query(self, a, b, rim_blocks: bool = True,
                      exempt_cell: tuple[int, int] | None = None,
                      unknown_blocks: bool = False) -> int:
        """kernels.SEG_FREE / SEG_BLOCKED / SEG_OOB for segment a-b."""
        ex_ix, ex_iy = exempt_cell if exempt_cell is not None else (-1, -1)
        return int(kernels.segment_state(
            self.cells, self.origin[0], self.origin[1], self.cell_size,
            float(a[0]), float(a[1]), float(b[0]), float(b[1]),
            bool(rim_blocks), ex_ix, ex_iy, bool(unknown_blocks)))

    def count_rim_cells(self, path) -> int:
        """Distinct outer-rim cells traversed by the waypoint polyline.
        Segment parts outside the grid are ignored."""
        pts = [np.asarray(p, dtype=float) for p in path]
        if len(pts) == 0:
            return 0
        if len(pts) == 1:
            pts = [pts[0], pts[0]]
        seen: set[tuple[int, int]] = set()
        for a, b in zip(pts[:-1], pts[1:]):
            clipped = self._clip_segment(a, b)
            if clipped is None:
                continue
            for c in self.supercover_cells(*clipped):
                if self.cells[c[1], c[0]] == CellState.OUTER_RIM:
                    seen.add(c)
        return len(seen)

    def _clip_segment(self, a, b, eps: float = 1e-9):
        """Liang-Barsky clip of segment a-b to the grid extent (shrunk by
        eps so clipped endpoints stay strictly inside); None when the
        segment misses the grid entirely."""
        x0, y0 = self.origin
        x1 = x0 + self.width * self.cell_size
        y1 = y0 + self.height * self.cell_size
        lo = np.array([x0 + eps, y0 + eps])
        hi = np.array([x1 - eps, y1 - eps])
        d = b - a
        t0, t1 = 0.0, 1.0
        for k in range(2):
            if abs(d[k]) < 1e-15:
                if a[k] < lo[k] or a[k] > hi[k]:
                    return None
                continue
            ta = (lo[k] - a[k]) / d[k]
            tb = (hi[k] - a[k]) / d[k]
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return None
        return a + t0 * d, a + t1 * d

    # -- export ------------------------------------------------------------

    def to_pgm(self, path) -> None:
        """P2 snapshot, one pixel per cell, top row = highest-y cell row."""
        levels = np.zeros(256, dtype=np.uint8)
        for state, grey in _PGM_LEVELS.items():
            levels[state] = grey
        img = levels[self.cells[::-1]]
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"P2\n{self.width} {self.height}\n255\n")
            for row in img:
                fh.write(" ".join(str(int(v)) for v in row))
                fh.write("\n")

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(origin=self.origin, cell_size=self.cell_size,
                             width=self.width, height=self.height,
                             cells=self.cells.copy(), rim_value=self.rim_value,
                             skipped_marks=self.skipped_marks,
                             revision=self.revision)
