import numpy as np
import pytest

from conecurve import fixtures
from conecurve.cone import orthant


@pytest.fixture
def octant():
    return orthant(3)


@pytest.fixture
def k1():
    return fixtures.single_vertex()


@pytest.fixture
def pair():
    return fixtures.symmetric_pair()


@pytest.fixture
def five():
    return fixtures.five_vertex()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
