import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcontact import jets
from weakcontact.errors import JetDomainError, JetOrderError
from weakcontact.jets import Jet, jeinsum, partial, seed_point


def coeffs1(j):
    """Univariate Taylor coefficients of a 1-variable jet."""
    return [float(j.coefficient((k,))) for k in range(j.order + 1)]


def test_seed_single_variable():
    (x,) = seed_point([3.0], 2)
    assert coeffs1(x) == [3.0, 1.0, 0.0]


def test_seed_then_square():
    (x,) = seed_point([3.0], 2)
    assert coeffs1(x * x) == [9.0, 6.0, 1.0]


def test_product_rule_two_variables():
    x, y = seed_point([2.0, 5.0], 2)
    f = x * y
    assert partial(f, (1, 0)) == 5.0
    assert partial(f, (0, 1)) == 2.0
    assert partial(f, (1, 1)) == 1.0
    assert partial(f, (2, 0)) == 0.0


def test_seed_rejects_bad_order():
    with pytest.raises(ValueError):
        seed_point([0.0], 4)


def test_elementary_series():
    (x,) = seed_point([0.0], 3)
    np.testing.assert_allclose(coeffs1(jets.sin(x)), [0, 1, 0, -1 / 6], atol=1e-15)
    np.testing.assert_allclose(coeffs1(1 / (1 - x)), [1, 1, 1, 1], atol=1e-15)
    (y,) = seed_point([4.0], 2)
    r = jets.sqrt(y)
    assert r.value == pytest.approx(2.0)
    assert partial(r, (1,)) == pytest.approx(0.25)


def test_partials():
    (x,) = seed_point([0.0], 3)
    assert partial(jets.sin(x), (3,)) == pytest.approx(-1.0)
    x, y = seed_point([1.0, 1.0], 3)
    assert partial(x * x * y, (1, 1)) == pytest.approx(2.0)
    c = Jet.constant(7.0, 2, 3)
    for alpha in [(1, 0), (0, 2), (2, 1)]:
        assert partial(c, alpha) == 0.0


def test_partial_beyond_order():
    (x,) = seed_point([1.0], 2)
    with pytest.raises(JetOrderError):
        partial(x * x, (3,))
    with pytest.raises(JetOrderError):
        x.d(0).d(0).d(0)


def test_domain_errors():
    (x,) = seed_point([-1.0], 2)
    with pytest.raises(JetDomainError):
        jets.log(x)
    with pytest.raises(JetDomainError):
        jets.sqrt(x)


def test_truncate_is_prefix():
    x, y = seed_point([0.3, -0.7], 3)
    f = jets.exp(x * y) + jets.cos(y)
    g = f.truncate(2)
    assert g.order == 2
    for alpha in [(0, 0), (1, 0), (1, 1), (0, 2)]:
        assert g.coefficient(alpha) == f.coefficient(alpha)


def test_jeinsum_matches_numpy_on_values():
    rng = np.random.default_rng(1)
    p = seed_point(rng.normal(size=3), 2)
    A = jets.stack([jets.stack([p[0] * p[1], p[2]]), jets.stack([jets.sin(p[0]), p[1] ** 2])])
    v = rng.normal(size=2)
    out = jeinsum("ij,j->i", A, v)
    np.testing.assert_allclose(out.value, A.value @ v)
    with pytest.raises(ValueError):
        jeinsum("ij,j", A, v)


def test_inverse_matrix_jet():
    x, y = seed_point([0.4, 1.3], 3)
    A = jets.stack([jets.stack([1 + x * x, y]), jets.stack([y, 2 + jets.sin(x)])])
    Ai = jets.inv(A)
    eye = jeinsum("ij,jk->ik", A, Ai)
    assert np.max(np.abs(eye.coeffs[..., 1:])) < 1e-13
    np.testing.assert_allclose(eye.value, np.eye(2), atol=1e-14)


small = st.floats(-1.5, 1.5, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(small, small)
def test_derivatives_match_closed_form(a, b):
    # f = sin(x) * exp(y): every partial up to order 3 is known in closed form
    x, y = seed_point([a, b], 3)
    f = jets.sin(x) * jets.exp(y)
    sin_d = [math.sin(a), math.cos(a), -math.sin(a), -math.cos(a)]
    for i in range(4):
        for j in range(4 - i):
            assert partial(f, (i, j)) == pytest.approx(sin_d[i] * math.exp(b), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_power_log_exp_consistency(a, p):
    (x,) = seed_point([a], 3)
    lhs = jets.power(x, p)
    rhs = jets.exp(p * jets.log(x))
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-11, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(small, small, small)
def test_arithmetic_ring_laws(a, b, c):
    x, y, z = seed_point([a, b, c], 3)
    lhs = (x + y) * z
    rhs = x * z + y * z
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-13)
    q = (x * y + 2.0) / (x * y + 2.0)
    np.testing.assert_allclose(q.coeffs, Jet.constant(1.0, 3, 3).coeffs, atol=1e-12)


def test_plain_values_pass_through():
    assert jets.sin(0.5) == pytest.approx(math.sin(0.5))
    assert jets.value_of(2.5) == 2.5
