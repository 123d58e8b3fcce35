import math

import numpy as np
import pytest

from cylwave.field import DomainGrid

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def small_grid():
    """K = 6 modes on a 4 pi torus with 8 x 8 transverse lattice points."""
    return DomainGrid.build(K=6, L_y=4 * math.pi, L_z=4 * math.pi, N_y=8, N_z=8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
