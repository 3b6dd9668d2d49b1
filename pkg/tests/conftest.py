"""Shared fixtures: small grids and seeded random field factories."""

import numpy as np
import pytest
import testutil

from casimirlab import ScalarField, make_grid


def pytest_terminal_summary(terminalreporter):
    if testutil.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in testutil.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def g16():
    return make_grid(16)


@pytest.fixture(scope="session")
def g32():
    return make_grid(32)


@pytest.fixture(scope="session")
def g64():
    return make_grid(64)


@pytest.fixture()
def rng():
    return np.random.default_rng(7)


@pytest.fixture()
def random_field():
    """Factory for seeded interior-supported (zero-trace) random fields."""

    def make(grid, seed=0, scale=1.0):
        r = np.random.default_rng(seed)
        return ScalarField(grid, scale * r.standard_normal(grid.shape), zero_trace=True)

    return make
