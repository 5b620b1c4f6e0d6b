import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

LAMBDAS = [(1.0, 0.0, -1.0), (2.0, 0.0, -2.0), (1.5, 0.2, -1.7), (3.0, -1.0, -2.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_chamber(rng, scale=1.0):
    """A random lambda in the open chamber with both gaps at least 0.2*scale."""
    g1, g2 = rng.uniform(0.2, 1.2, size=2) * scale
    l2 = (g2 - g1) / 3.0
    return (l2 + g1, l2, l2 - g2)


def random_pair(rng, bound=2.0):
    """(mu, lam) with |mu| |lam| <= bound."""
    lam = random_chamber(rng)
    mu = rng.normal(size=3)
    r = rng.uniform(0.1, bound)
    mu = mu / np.linalg.norm(mu) * r / np.linalg.norm(lam)
    return tuple(float(v) for v in mu), lam


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, _line

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for i in sorted(RESULTS):
            terminalreporter.write_line(_line(i))
