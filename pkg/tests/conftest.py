import numpy as np
import pytest

from precs.bosonic import make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid6():
    """R=6, h=0.05 grid used by the reconstruction checks."""
    return make_grid(6.0, 0.05)


@pytest.fixture(scope="session")
def grid_coarse():
    return make_grid(6.0, 0.1)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one pass/fail line per acceptance criterion and echo it."""

    def _record(number, passed, detail):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
