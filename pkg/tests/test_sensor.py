"""Ray-fan sensor: geometric hits, field-of-view and range limits, and
scan integration into the occupancy grid."""

import math

import numpy as np
import pytest

from avoidsim.geometry import WorldModel, rectangle
from avoidsim.grid import CellState, OccupancyGrid
from avoidsim.sensor import Scan, SensorConfig, integrate_scan, scan


def wall_world(xmin=5.0):
    return WorldModel(obstacles=[rectangle(xmin, -10.0, xmin + 1.0, 10.0)],
                      bounds=(-20, -20, 20, 20))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SensorConfig(fov_deg=0.0)
        with pytest.raises(ValueError):
            SensorConfig(fov_deg=181.0)
        with pytest.raises(ValueError):
            SensorConfig(range=-1.0)
        with pytest.raises(ValueError):
            SensorConfig(ray_count=1)


class TestScanGeometry:
    def test_head_on_distance(self):
        # an odd ray count places one ray exactly along the heading
        s = scan(wall_world(5.0), (0.0, 0.0), 0.0, SensorConfig(ray_count=129))
        assert s.hit_mask.any()
        # the central ray hits the wall face at exactly x = 5
        center = s.endpoints[s.endpoints.shape[0] // 2]
        assert center[0] == pytest.approx(5.0, abs=1e-9)
        assert center[1] == pytest.approx(0.0, abs=1e-9)

    def test_all_hits_on_obstacle_boundary(self):
        w = wall_world(4.0)
        s = scan(w, (0.0, 0.0), 0.0, SensorConfig())
        for h in s.hits:
            assert w.distance(h) == pytest.approx(0.0, abs=1e-9)

    def test_out_of_range_misses(self):
        s = scan(wall_world(11.0), (0.0, 0.0), 0.0, SensorConfig(range=10.0))
        assert not s.hit_mask.any()
        # endpoints sit on the range circle
        d = np.hypot(s.endpoints[:, 0], s.endpoints[:, 1])
        assert np.allclose(d, 10.0)

    def test_behind_not_seen(self):
        # wall behind the sensor (heading +x, fov 87 deg)
        w = WorldModel(obstacles=[rectangle(-6.0, -10.0, -5.0, 10.0)],
                       bounds=(-20, -20, 20, 20))
        s = scan(w, (0.0, 0.0), 0.0, SensorConfig())
        assert not s.hit_mask.any()

    def test_fov_edge(self):
        # an obstacle ~52 degrees off-axis is outside an 87-degree fov
        # (half-angle 43.5) but inside a 120-degree one
        obs = rectangle(1.2, 2.6, 2.0, 3.4)   # nearest corner bearing ~52 deg
        w = WorldModel(obstacles=[obs], bounds=(-20, -20, 20, 20))
        assert not scan(w, (0.0, 0.0), 0.0,
                        SensorConfig(fov_deg=87.0)).hit_mask.any()
        assert scan(w, (0.0, 0.0), 0.0,
                    SensorConfig(fov_deg=120.0)).hit_mask.any()

    def test_heading_rotates_fan(self):
        w = wall_world(5.0)
        assert scan(w, (0.0, 0.0), 0.0, SensorConfig()).hit_mask.any()
        assert not scan(w, (0.0, 0.0), math.pi, SensorConfig()).hit_mask.any()

    def test_empty_world(self):
        w = WorldModel(obstacles=[], bounds=(-20, -20, 20, 20))
        s = scan(w, (0.0, 0.0), 0.0, SensorConfig())
        assert s.hits.shape == (0, 2)
        assert not s.hit_mask.any()

    def test_noise_requires_rng_and_perturbs(self):
        w = wall_world(5.0)
        cfg = SensorConfig(noise_sigma=0.05)
        rng = np.random.default_rng(0)
        s = scan(w, (0.0, 0.0), 0.0, cfg, rng=rng)
        clean = scan(w, (0.0, 0.0), 0.0, SensorConfig())
        assert s.hit_mask.sum() == clean.hit_mask.sum()
        assert not np.allclose(s.hits, clean.hits)

    def test_deterministic(self):
        w = wall_world(5.0)
        a = scan(w, (0.3, -0.2), 0.1, SensorConfig())
        b = scan(w, (0.3, -0.2), 0.1, SensorConfig())
        assert np.array_equal(a.hits, b.hits)
        assert np.array_equal(a.endpoints, b.endpoints)


class TestIntegration:
    def grid(self):
        return OccupancyGrid.from_bounds(-20, -20, 20, 20, cell_size=0.5)

    def test_carves_free_and_marks_hits(self):
        g = self.grid()
        s = scan(wall_world(5.0), (0.0, 0.0), 0.0, SensorConfig())
        changed = integrate_scan(g, s)
        assert changed > 0
        # space short of the wall is free, the wall face cell occupied,
        # space behind the wall never sensed
        assert g.state_at((2.0, 0.0)) == CellState.FREE
        assert g.state_at((5.2, 0.0)) == CellState.OCCUPIED
        assert g.state_at((8.0, 0.0)) == CellState.UNKNOWN

    def test_occupied_is_sticky(self):
        g = self.grid()
        s = scan(wall_world(5.0), (0.0, 0.0), 0.0, SensorConfig())
        integrate_scan(g, s)
        # viewing the same area from a spot where the old wall cell now
        # lies along a free ray must not downgrade it
        g2 = g.copy()
        s2 = scan(WorldModel(obstacles=[], bounds=(-20, -20, 20, 20)),
                  (0.0, 0.0), 0.0, SensorConfig())
        integrate_scan(g2, s2)
        assert g2.state_at((5.2, 0.0)) == CellState.OCCUPIED

    def test_free_carving_only_upgrades_unknown(self):
        g = self.grid()
        g.mark_occupied((2.0, 0.0))
        s = scan(WorldModel(obstacles=[], bounds=(-20, -20, 20, 20)),
                 (0.0, 0.0), 0.0, SensorConfig())
        integrate_scan(g, s)
        assert g.state_at((2.0, 0.0)) == CellState.OCCUPIED

    def test_hits_outside_grid_skipped(self):
        g = OccupancyGrid.from_bounds(-2, -2, 2, 2, cell_size=0.5)
        s = scan(wall_world(5.0), (0.0, 0.0), 0.0, SensorConfig())
        integrate_scan(g, s)
        assert g.skipped_marks > 0

    def test_scan_then_integrate_deterministic(self):
        g1, g2 = self.grid(), self.grid()
        for g in (g1, g2):
            s = scan(wall_world(5.0), (-1.0, 0.5), 0.05, SensorConfig())
            integrate_scan(g, s)
        assert np.array_equal(g1.cells, g2.cells)
