"""Shared fixtures plus the acceptance-criteria terminal report.

Acceptance tests (tests/test_acceptance.py::test_criterion_*) register a
one-line summary in ACCEPTANCE_DETAILS; a terminal-summary hook prints one
PASS/FAIL line per criterion at the end of the run so the verdicts are
visible even when pytest captures stdout.
"""

from __future__ import annotations

import re
import sys

import numpy as np
import pytest

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))

from avoidsim.grid import CellState, OccupancyGrid
from avoidsim.local_window import LocalMap

# criterion number -> detail string, filled in by the acceptance tests
ACCEPTANCE_DETAILS: dict[int, str] = {}
_ACCEPTANCE_OUTCOMES: dict[int, str] = {}

_CRITERION_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def local_map_from_cells(cells, origin=(0.0, 0.0), cell_size=1.0) -> LocalMap:
    """Wrap a raw cell array (already in its final states) as a LocalMap."""
    cells = np.asarray(cells, dtype=np.uint8)
    h, w = cells.shape
    grid = OccupancyGrid(origin=origin, cell_size=cell_size,
                         width=w, height=h, cells=cells)
    return LocalMap(grid=grid, window=grid.extent)


@pytest.fixture
def free_map():
    """A 40 x 40 fully known-free 1 m lattice."""
    return local_map_from_cells(
        np.full((40, 40), CellState.FREE, dtype=np.uint8))


def pytest_runtest_logreport(report):
    m = _CRITERION_RE.search(report.nodeid)
    if m and report.when == "call":
        _ACCEPTANCE_OUTCOMES[int(m.group(1))] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE_OUTCOMES):
        verdict = "PASS" if _ACCEPTANCE_OUTCOMES[num] == "passed" else "FAIL"
        detail = ACCEPTANCE_DETAILS.get(num, "")
        tr.write_line(f"{verdict} criterion {num}: {detail}")
