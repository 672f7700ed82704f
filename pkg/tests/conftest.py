import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from modgen import bygen
from modgen.specfun import Grid1D

settings.register_profile("modgen", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("modgen")


@pytest.fixture(scope="session")
def grid():
    return bygen.standard_grid()


@pytest.fixture(scope="session")
def small_grid():
    return Grid1D(-8.0, 8.0, 1024)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
