import numpy as np
import pytest

from weakcontact import jets
from weakcontact.errors import DegenerateFrame
from weakcontact.gallery import ellipsoid, round_sphere
from weakcontact.manifold import (
    ChartManifold,
    Field,
    SamplePlan,
    bracket,
    full_frame,
    induced_metric,
    orthonormal_frame_D,
    sample_points,
)


def euclid(lo=-1.0, hi=1.0):
    return ChartManifold([lo] * 3, [hi] * 3, metric=lambda x: np.eye(3), labels=("x", "y", "z"))


def ellipsoid_metric_formula(p, a):
    r = p[0]
    return np.diag([np.sin(r) ** 2 + np.cos(r) ** 2 / a, np.cos(r) ** 2, np.sin(r) ** 2 / a])


def test_round_sphere_metric_at_point():
    chart = round_sphere().chart
    g = chart.metric.at([np.pi / 4, 0.0, 0.0])
    np.testing.assert_allclose(g, np.diag([1.0, 0.5, 0.5]), atol=1e-14)


@pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
def test_ellipsoid_metric_matches_formula(a):
    chart = ellipsoid(a).chart
    for p in sample_points(chart, SamplePlan(count=15, seed=3)):
        np.testing.assert_allclose(chart.metric.at(p), ellipsoid_metric_formula(p, a), atol=1e-13)
        # independent complex-step route
        np.testing.assert_allclose(chart.metric_values(p), ellipsoid_metric_formula(p, a), atol=1e-13)


def test_one_dimensional_circle_embedding():
    g = induced_metric(lambda x: [jets.cos(x[0]), jets.sin(x[0])], [0.7])
    assert g.shape == (1, 1)
    assert g[0, 0] == pytest.approx(1.0)


def test_chart_validation():
    with pytest.raises(ValueError):
        ChartManifold([0, 0], [1, 1], metric=lambda x: np.eye(2))
    with pytest.raises(ValueError):
        ChartManifold([0, 0, 0], [1, 1, 1])
    with pytest.raises(ValueError):
        ChartManifold([0, 0, 0], [1, 0, 1], metric=lambda x: np.eye(3))


def test_brackets():
    chart = euclid()
    X = Field.closed_form(lambda x: [0.0, x[0], 0.0], "vector")  # x d_y
    dx = Field.constant([1.0, 0.0, 0.0], "vector")
    p = np.array([0.3, -0.2, 0.1])
    np.testing.assert_allclose(bracket(X, dx, p), [0.0, -1.0, 0.0])
    np.testing.assert_allclose(bracket(X, X, p), 0.0)
    e = ellipsoid(2.0).chart
    t1 = Field.constant([0.0, 1.0, 0.0], "vector")
    t2 = Field.constant([0.0, 0.0, 1.0], "vector")
    np.testing.assert_allclose(bracket(t1, t2, [0.4, 0.1, 0.2]), 0.0)
    assert e.dim == 3 and e.n == 1


def test_sampling_contract():
    chart = ChartManifold([0.0] * 3, [1.0] * 3, metric=lambda x: np.eye(3))
    pts = sample_points(chart, SamplePlan(count=2, seed=0, margin=0.1))
    assert len(pts) == 2
    assert not np.allclose(pts[0], pts[1])
    assert np.all((pts >= 0.1) & (pts <= 0.9))
    again = sample_points(chart, SamplePlan(count=2, seed=0, margin=0.1))
    assert np.array_equal(pts, again)
    other = sample_points(chart, SamplePlan(count=2, seed=5, margin=0.1))
    assert not np.array_equal(pts, other)


def test_sampling_on_ellipsoid_avoids_poles():
    chart = ellipsoid(2.0).chart
    pts = sample_points(chart, SamplePlan(count=100))
    assert len(pts) == 100
    assert all(chart.contains(p) for p in pts)
    assert pts[:, 0].min() > 0.05 * np.pi / 2 - 1e-12
    assert pts[:, 0].max() < 0.95 * np.pi / 2 + 1e-12


def test_sample_plan_validation():
    with pytest.raises(ValueError):
        SamplePlan(margin=0.5)
    with pytest.raises(ValueError):
        SamplePlan(count=-1)


def test_frame_euclidean():
    F = orthonormal_frame_D(np.eye(3), np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(F, [[1, 0, 0], [0, 1, 0]])


def test_frame_on_ellipsoid():
    e = ellipsoid(2.0)
    for p in sample_points(e.chart, SamplePlan(count=20)):
        g = e.chart.metric.at(p)
        xi = e.xi.at(p)
        F = full_frame(g, xi)
        np.testing.assert_allclose(F @ g @ F.T, np.eye(3), atol=1e-12)
        eta = g @ xi
        np.testing.assert_allclose(F[1:] @ eta, 0.0, atol=1e-12)


def test_frame_degenerate_xi():
    with pytest.raises(DegenerateFrame):
        orthonormal_frame_D(np.eye(3), np.zeros(3))


def test_field_cache_and_truncation():
    calls = []

    def fn(p, order):
        calls.append(order)
        return jets._seed(p, 3)

    f = Field(fn, "vector")
    a = f([0.1, 0.2, 0.3], 2)
    b = f([0.1, 0.2, 0.3], 2)
    assert a is b and a.order == 2
    assert calls == [2]
    with pytest.raises(ValueError):
        Field(fn, "spinor")
