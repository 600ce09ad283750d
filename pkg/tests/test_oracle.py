import numpy as np
import pytest

from weakcontact import jets
from weakcontact.gallery import ellipsoid
from weakcontact.manifold import ChartManifold, SamplePlan, sample_points
from weakcontact.oracle import ORACLE_TOL, fd_christoffel, fd_ricci, fd_riemann, oracle_report, relative_error
from weakcontact.riemann import local_geometry


def test_relative_error():
    assert relative_error([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert relative_error([1.1], [1.0]) == pytest.approx(0.1)
    assert relative_error([1e-3], [0.0]) == pytest.approx(1e-3)


def test_fd_sphere_closed_form():
    # metric chart (no embedding) so the oracle differentiates a closed form
    chart = ChartManifold(
        [0.0, -np.pi, -np.pi],
        [np.pi / 2, np.pi, np.pi],
        metric=lambda x: np.diag([1.0, jets.cos(x[0]) ** 2, jets.sin(x[0]) ** 2]),
    )
    p = np.array([np.pi / 4, 0.3, -0.2])
    G = fd_christoffel(chart, p)
    assert G[0, 1, 1] == pytest.approx(0.5, abs=1e-9)
    assert G[0, 2, 2] == pytest.approx(-0.5, abs=1e-9)
    np.testing.assert_allclose(fd_ricci(chart, p), 2 * np.diag([1.0, 0.5, 0.5]), atol=1e-6)


@pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
def test_jets_match_oracle(a):
    chart = ellipsoid(a).chart
    rep = oracle_report(chart, sample_points(chart, SamplePlan(count=20, seed=1)))
    assert rep.all_passed, [(c.check_name, c.max_residual) for c in rep.checks]
    assert rep["oracle.christoffel"].max_residual < 1e-9


def test_three_point_stencil_is_coarser():
    chart = ellipsoid(2.0).chart
    p = sample_points(chart, SamplePlan(count=1, seed=2))[0]
    R = local_geometry(chart.metric, p, 2).riemann.value
    e5 = relative_error(R, fd_riemann(chart, p, stencil=4))
    e3 = relative_error(R, fd_riemann(chart, p, stencil=2))
    assert e5 < ORACLE_TOL and e5 < e3
