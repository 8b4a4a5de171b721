import numpy as np
import pytest

from liesig import SO3, DiscretePath, Euclidean, integrate
from liesig.lie_groups import sample_uniform_so3


def random_so3_path(rng, T, scale=0.4):
    deriv = rng.normal(scale=scale, size=(T, 3))
    return integrate(SO3, deriv, sample_uniform_so3(rng))


def random_euclidean_path(rng, T, N, scale=0.5):
    return DiscretePath(Euclidean(N), (np.cumsum(rng.normal(scale=scale, size=(T + 1, N)), axis=0),))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}")
