"""Local planning window: box computation, lattice-aligned extraction with
inflation, and the bounded expansion ladder."""

import numpy as np
import pytest

import oracles
from avoidsim.grid import CellState, OccupancyGrid
from avoidsim.local_window import (ExpansionCeilingError, WindowError,
                                   WindowSpec, compute_window,
                                   extract_local_map, maximize_map)


class TestSpec:
    def test_defaults_valid(self):
        spec = WindowSpec()
        assert spec.d_corner >= spec.d_safe

    def test_corner_below_safe_rejected(self):
        with pytest.raises(WindowError):
            WindowSpec(d_corner=2.0, d_safe=3.0)

    def test_step_positive(self):
        with pytest.raises(WindowError):
            WindowSpec(expansion_step=0.0)


class TestComputeWindow:
    def test_contains_both_with_margin(self):
        w = compute_window((1.0, 2.0), (7.0, -3.0), d_corner=4.0)
        assert w == (-3.0, -7.0, 11.0, 6.0)

    def test_coincident_points(self):
        w = compute_window((2.0, 2.0), (2.0, 2.0), d_corner=4.0)
        assert w == (-2.0, -2.0, 6.0, 6.0)

    def test_rejects_nonpositive_margin(self):
        with pytest.raises(WindowError):
            compute_window((0, 0), (1, 1), d_corner=0.0)


class TestExtraction:
    def global_grid(self):
        g = OccupancyGrid.from_bounds(-10, -10, 10, 10, cell_size=0.5)
        g.cells[:] = CellState.FREE
        g.mark_occupied((2.2, 1.2))
        return g

    def test_lattice_alignment(self):
        g = self.global_grid()
        lm = extract_local_map(g, (-1.3, -2.1, 5.2, 4.9),
                               d_safe=1.0, rim_width=0.5)
        # local origin sits on the global lattice
        dx = (lm.grid.origin[0] - g.origin[0]) / g.cell_size
        dy = (lm.grid.origin[1] - g.origin[1]) / g.cell_size
        assert dx == pytest.approx(round(dx), abs=1e-9)
        assert dy == pytest.approx(round(dy), abs=1e-9)
        # snapped-out box covers the requested window
        ext = lm.grid.extent
        assert ext[0] <= -1.3 and ext[1] <= -2.1
        assert ext[2] >= 5.2 and ext[3] >= 4.9

    def test_inflates_window_content(self):
        g = self.global_grid()
        lm = extract_local_map(g, (0.0, 0.0, 5.0, 4.0),
                               d_safe=1.0, rim_width=0.5)
        # inflation of the cutout matches the brute-force oracle
        i0 = round((lm.grid.origin[0] - g.origin[0]) / g.cell_size)
        j0 = round((lm.grid.origin[1] - g.origin[1]) / g.cell_size)
        raw = g.cells[j0:j0 + lm.grid.height, i0:i0 + lm.grid.width]
        want = oracles.inflate_bruteforce(raw, g.cell_size, 1.0, 0.5)
        assert (lm.grid.cells == want).all()

    def test_global_grid_untouched(self):
        g = self.global_grid()
        before = g.cells.copy()
        extract_local_map(g, (0.0, 0.0, 5.0, 4.0), d_safe=2.0, rim_width=0.5)
        assert (g.cells == before).all()

    def test_clips_to_global_bounds(self):
        g = self.global_grid()
        lm = extract_local_map(g, (-15.0, -15.0, -5.0, -5.0),
                               d_safe=1.0, rim_width=0.5)
        assert lm.grid.extent[0] >= -10.0 and lm.grid.extent[1] >= -10.0

    def test_disjoint_window_raises(self):
        g = self.global_grid()
        with pytest.raises(WindowError):
            extract_local_map(g, (20.0, 20.0, 30.0, 30.0),
                              d_safe=1.0, rim_width=0.5)

    def test_tracks_source_revision(self):
        g = self.global_grid()
        lm = extract_local_map(g, (0, 0, 4, 4), d_safe=1.0, rim_width=0.5)
        assert lm.source_revision == g.revision


class TestExpansion:
    def test_grows_by_step(self):
        spec = WindowSpec(d_corner=4.0, expansion_step=5.0)
        grown = maximize_map(spec)
        assert grown.d_corner == 9.0
        assert grown.expansion_count == 1
        assert spec.d_corner == 4.0    # frozen original untouched

    def test_ceiling_raises(self):
        spec = WindowSpec()
        for _ in range(spec.expansion_ceiling):
            spec = maximize_map(spec)
        with pytest.raises(ExpansionCeilingError):
            maximize_map(spec)
