import numpy as np
import pytest

from weakcontact.contact import construct_from_killing
from weakcontact.gallery import ellipsoid, round_sphere
from weakcontact.manifold import SamplePlan, sample_points


@pytest.fixture(scope="session")
def sphere():
    e = round_sphere()
    return construct_from_killing(e.chart, e.xi)


@pytest.fixture(scope="session")
def ell2():
    e = ellipsoid(2.0)
    return construct_from_killing(e.chart, e.xi)


def points(S, count=20, seed=0):
    return sample_points(S.chart, SamplePlan(count=count, seed=seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
