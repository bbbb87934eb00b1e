import math

import numpy as np
import pytest

from qrange.ellipse import st_ellipse
from qrange.geometry import boundary_functions, center_upper, left_derivatives
from qrange.qmatrix import QMatrix
from qrange.sampler import upper_hull

SQRT3 = math.sqrt(3.0)
M_EX = 0.5 - SQRT3 / 4
BIG_M_EX = 0.5 + SQRT3 / 4
SLOPE_EX = 2 * SQRT3 / 3


def a_ex() -> QMatrix:
    return QMatrix.from_components([[0.0, 0.25], [-0.25, 1.0]], [[0.125, 0.0], [0.0, 0.125]])


def random_qmatrix(rng: np.random.Generator, n: int) -> QMatrix:
    return QMatrix(rng.standard_normal((n, n, 4)))


def random_hermitian(rng: np.random.Generator, n: int) -> QMatrix:
    B = random_qmatrix(rng, n)
    return (B + B.adjoint()).scale(0.5)


@pytest.fixture(scope="session")
def A_ex():
    return a_ex()


@pytest.fixture(scope="session")
def est_ex(A_ex):
    """Pipeline estimate at the default budget (2e5 samples, 720 directions)."""
    return upper_hull(A_ex)


@pytest.fixture(scope="session")
def geo_ex(est_ex):
    bf = boundary_functions(est_ex)
    tp = left_derivatives(bf)
    cr = center_upper(est_ex, tp)
    return bf, tp, cr


@pytest.fixture(scope="session")
def model_ex():
    return st_ellipse(0.25, 0.125, 0.125)


@pytest.fixture(scope="session")
def est_hermitian():
    return upper_hull(QMatrix.from_components(np.diag([1.0, 2.0])), theta_steps=64, samples=2000)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
