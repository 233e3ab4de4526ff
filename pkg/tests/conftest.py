import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from inspectroute import Instance  # noqa: E402


def matrix_instance(C, name="m", points=None):
    """Instance from a (possibly inf-holed) cost matrix; points default to a line."""
    C = np.array(C, dtype=float)
    n = C.shape[0]
    if points is None:
        points = np.column_stack([np.arange(n, dtype=float), np.zeros(n), np.zeros(n)])
    return Instance(name, points, C)


def rel_close(a, b, tol=1e-9):
    return math.isclose(a, b, rel_tol=tol, abs_tol=1e-300)


@pytest.fixture
def path_graph():
    inf = math.inf
    return matrix_instance([[0, 1, inf], [1, 0, 2], [inf, 2, 0]], "path3")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
