import cmath
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from circuit_amoeba.core import circuit_polynomial

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TRIANGLE = ([(0, 0), (2, 1), (1, 2)], (1, 1))
DELTOID = ([(0, 0), (3, 0), (0, 3)], (1, 1))
TALL = ([(0, 0), (2, 1), (1, 8)], (1, 3))
SKEW = ([(0, 0), (4, 0), (0, 4)], (2, 1))


def triangle(c=-4.0, b=(1, 1, 1)):
    return circuit_polynomial(*TRIANGLE, b, c)


def deltoid(c=0.0, b=(1, 1, 1)):
    return circuit_polynomial(*DELTOID, b, c)


def tall(c=0.0):
    return circuit_polynomial(*TALL, (1, 2.4, 1 + 1.3j), c)


def skew(c=0.0, b=(1, 1, 1)):
    return circuit_polynomial(*SKEW, b, c)


def random_support(rng, n=2, bound=8, barycentric=False):
    """Random circuit: simplex with alpha(0)=0 and an interior lattice point."""
    from circuit_amoeba.errors import InvalidInput
    while True:
        alphas = [tuple([0] * n)] + [tuple(int(v) for v in rng.integers(0, bound + 1, n)) for _ in range(n)]
        m = np.array(alphas[1:], dtype=float).T
        if abs(np.linalg.det(m)) < 0.5:
            continue
        if barycentric:
            s = np.sum(alphas, axis=0)
            if np.any(s % (n + 1)):
                continue
            y = tuple(int(v) for v in s // (n + 1))
        else:
            lo = np.min(alphas, axis=0)
            hi = np.max(alphas, axis=0)
            y = tuple(int(rng.integers(lo[k], hi[k] + 1)) for k in range(n))
        try:
            circuit_polynomial(alphas, y, [1] * (n + 1), 0)
        except InvalidInput:
            continue
        return alphas, y


def random_coeffs(rng, n, spread=1.0):
    return [1.0] + [complex(cmath.rect(math.exp(rng.uniform(-spread, spread)), rng.uniform(0, 2 * math.pi)))
                    for _ in range(n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
