import numpy as np
import pytest

from lipsmooth.grid import Box, GridFunction

# acceptance criterion number -> list of (passed, detail)
CRITERIA = {}


def grid1d(values_or_fn, n=401, lo=-1.0, hi=1.0):
    x = np.linspace(lo, hi, n)
    v = values_or_fn(x) if callable(values_or_fn) else values_or_fn
    return GridFunction(Box(lo, hi), v)


def grid2d(fn, n=65, lo=-1.0, hi=1.0):
    ax = np.linspace(lo, hi, n)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    return GridFunction(Box((lo, lo), (hi, hi)), fn(X, Y))


@pytest.fixture
def criterion():
    def record(number, passed, detail=""):
        CRITERIA.setdefault(number, []).append((bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        for passed, detail in CRITERIA[number]:
            terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
