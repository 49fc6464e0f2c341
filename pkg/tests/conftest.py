import numpy as np
import pytest

from isoclouds.oracle import regular_polygon

# Trapezium and kite with identical pairwise distances (points as rows).
T_POINTS = np.array([[2, -0.5], [1, 0.5], [-1, 0.5], [-2, -0.5]])
K_POINTS = np.array([[2.5, 0], [-0.5, 1], [-0.5, -1], [-1.5, 0]])

S3 = 3**0.5
A3_MATRIX = np.array([[1.0, -0.5, -0.5], [0.0, S3 / 2, -S3 / 2]])
A4_MATRIX = np.array([[1.0, 0.0, 0.0, -1.0], [0.0, 1.0, -1.0, 0.0]])

# Reference optimal flow between the A3 and A4 columns.
REFERENCE_FLOW = [
    ["1/4", "1/24", "1/24", "0"],
    ["0", "5/24", "0", "1/8"],
    ["0", "0", "5/24", "1/8"],
]
# True optimum with L-inf ground distance: 7/24 + sqrt(3)/8.
A3_A4_EMD = 7 / 24 + S3 / 8


def rectangle(l1, l2):
    """Vertices (+-l1, +-l2) of an axis-aligned rectangle."""
    return np.array([[l1, l2], [l1, -l2], [-l1, l2], [-l1, -l2]], dtype=float)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def T():
    return T_POINTS.copy()


@pytest.fixture
def K():
    return K_POINTS.copy()


@pytest.fixture
def triangle():
    return regular_polygon(3)


@pytest.fixture
def square():
    return regular_polygon(4)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
