"""Ground-truth world geometry: convex obstacles and distance/ray queries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon in world coordinates, vertices counter-clockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise GeometryError("polygon needs at least 3 (x, y) vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("polygon vertices must be finite")
        area = _signed_area(v)
        if area < 0:
            v = v[::-1].copy()
            area = -area
        if area <= 0.0:
            raise GeometryError("polygon is degenerate (area <= 0)")
        cross = _edge_crosses(v)
        if np.any(cross < -1e-9):
            raise GeometryError("polygon is not convex")
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def contains(self, p) -> bool:
        """Closed containment test (boundary counts as inside)."""
        p = np.asarray(p, dtype=float)
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        edge = nxt - v
        rel = p - v
        cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
        return bool(np.all(cross >= -1e-12))

    def distance(self, p) -> float:
        """Euclidean distance from p to the polygon, 0 inside."""
        if self.contains(p):
            return 0.0
        p = np.asarray(p, dtype=float)
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        return float(np.min(_point_segment_distance(p, v, nxt)))


def rectangle(xmin: float, ymin: float, xmax: float, ymax: float) -> ConvexPolygon:
    if not (xmax > xmin and ymax > ymin):
        raise GeometryError("rectangle must have positive extent")
    return ConvexPolygon(np.array(
        [[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]], dtype=float))


@dataclass
class WorldModel:
    """Ground truth the sensor sees: convex obstacles inside a world extent."""

    obstacles: list[ConvexPolygon]
    bounds: tuple[float, float, float, float]
    _edges: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All obstacle edges stacked as (start, end) arrays of shape (m, 2)."""
        if self._edges is None:
            starts = []
            ends = []
            for poly in self.obstacles:
                v = poly.vertices
                starts.append(v)
                ends.append(np.roll(v, -1, axis=0))
            if starts:
                self._edges = (np.vstack(starts), np.vstack(ends))
            else:
                self._edges = (np.empty((0, 2)), np.empty((0, 2)))
        return self._edges

    def contains(self, p) -> bool:
        return any(poly.contains(p) for poly in self.obstacles)

    def distance(self, p) -> float:
        if not self.obstacles:
            return np.inf
        return min(poly.distance(p) for poly in self.obstacles)


def _signed_area(v: np.ndarray) -> float:
    x = v[:, 0]
    y = v[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _edge_crosses(v: np.ndarray) -> np.ndarray:
    nxt = np.roll(v, -1, axis=0)
    e = nxt - v
    e2 = np.roll(e, -1, axis=0)
    return e[:, 0] * e2[:, 1] - e[:, 1] * e2[:, 0]


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom == 0.0, 1.0, denom)
    t = np.clip(np.einsum("ij,j->i", ab, p) - np.einsum("ij,ij->i", ab, a), 0.0, denom) / denom
    closest = a + t[:, None] * ab
    return np.hypot(closest[:, 0] - p[0], closest[:, 1] - p[1])
