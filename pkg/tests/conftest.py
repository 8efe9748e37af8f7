import numpy as np
import pytest

from weighted_minkowski.body import cube, diamond, square
from weighted_minkowski.density import named


@pytest.fixture
def sq2():
    return square()


@pytest.fixture
def cu3():
    return cube(3)


@pytest.fixture
def dia2():
    return diamond()


@pytest.fixture
def x1():
    return named("X1", 2)


@pytest.fixture
def x1_3():
    return named("X1", 3)


@pytest.fixture
def leb():
    return named("LEB", 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
