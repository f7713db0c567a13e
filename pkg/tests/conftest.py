import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phasetour import AccelBound, build_cost_matrices, make_rect_grid  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def bound():
    return AccelBound(2.0, 0.02)


@pytest.fixture(scope="session")
def grid_2d3():
    return make_rect_grid(2, 3)


@pytest.fixture(scope="session")
def mats_2d3(grid_2d3, bound):
    return build_cost_matrices(grid_2d3, bound)


@pytest.fixture(scope="session")
def grid_2d4():
    return make_rect_grid(2, 4)


@pytest.fixture(scope="session")
def mats_2d4(grid_2d4, bound):
    return build_cost_matrices(grid_2d4, bound)


@pytest.fixture(scope="session")
def mats_6d3(bound):
    return build_cost_matrices(make_rect_grid(6, 3), bound)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][1:].split("/")[0].rstrip(":"))):
        terminalreporter.write_line(line)
