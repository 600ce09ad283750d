import numpy as np
import pytest

from conftest import points
from weakcontact import jets
from weakcontact.contact import (
    LadderLevel,
    WeakStructure,
    classify,
    compute_N_tensors,
    construct_from_killing,
    einstein_diagnostic,
    eq31_random,
    homothety,
    identity_suite,
    product_extension_check,
    trace_Q,
    verify_axioms,
)
from weakcontact.errors import DegenerateQ, NotKilling, NotUnit
from weakcontact.gallery import ellipsoid, flat_torus, round_sphere
from weakcontact.manifold import ChartManifold, Field
from weakcontact.riemann import hybrid_residual, lie_derivative_metric, local_geometry


def flat_candidate():
    """xi = d_z on a flat box with phi = 0 and Q = id: not even weak almost contact."""
    chart = flat_torus().chart
    return WeakStructure(
        chart,
        phi=Field.constant(np.zeros((3, 3)), "tensor11"),
        Q=Field.constant(np.eye(3), "tensor11"),
        xi=Field.constant([0.0, 0.0, 1.0], "vector"),
        eta=Field.constant([0.0, 0.0, 1.0], "covector"),
    )


# -- construction ----------------------------------------------------------

def test_sphere_structure_is_classical(sphere):
    pts = points(sphere, 10)
    for p in pts:
        ls = sphere.local(p)
        assert np.max(np.abs(ls.Qt.value)) < 1e-8
    c = classify(sphere, pts)
    assert c.level == LadderLevel.WeakKContact
    assert c.classical and c.normal
    assert c.describe() == "weak K-contact (classical: yes)"


def test_ellipsoid_structure_is_weak(ell2):
    c = classify(ell2, points(ell2, 20))
    assert c.level == LadderLevel.WeakKContact
    assert not c.classical and not c.normal
    assert np.mean(c.qtilde_norms > 1e-3) >= 0.9
    assert c.describe() == "weak K-contact (classical: no)"


def test_flat_torus_is_degenerate():
    e = flat_torus()
    with pytest.raises(DegenerateQ) as info:
        construct_from_killing(e.chart, e.xi)
    assert info.value.reason == "DegenerateQ"
    geo = local_geometry(e.chart.metric, [1.0, 2.0, 3.0], 2)
    assert float(np.einsum("lklj,k,j->", geo.riemann.value, [0, 0, 1.0], [0, 0, 1.0])) == 0.0


def test_flat_candidate_classification():
    S = flat_candidate()
    pts = points(S, 5)
    c = classify(S, pts)
    assert c.level == LadderLevel.NotWeakAlmostContact
    assert c.residuals["phi_squared"] > 0.1
    rep = einstein_diagnostic(S, pts)
    assert rep["einstein.ricci_eq_trQ_g"].status == "skipped"
    assert rep.meta["einstein"]["applicable"] is False


def test_non_unit_and_non_killing_rejected():
    e = ellipsoid(2.0)
    with pytest.raises(NotUnit):
        construct_from_killing(e.chart, e.xi.scaled(1.01))
    # d_rho on the round sphere is unit but not Killing
    s = round_sphere()
    with pytest.raises(NotKilling):
        construct_from_killing(s.chart, Field.constant([1.0, 0.0, 0.0], "vector"))


def test_broken_killing_hypothesis_detected(ell2):
    S = ell2.with_fields(xi=ell2.xi.scaled(1.01))
    rep = identity_suite(S, points(S, 5), "KContact")
    assert rep["kcontact.nabla_xi_eq_minus_phi"].max_residual > 1e-3
    assert not rep.all_passed


# -- axioms ----------------------------------------------------------------

@pytest.mark.parametrize("name", ["sphere", "ell2"])
def test_axioms_pass(name, request):
    S = request.getfixturevalue(name)
    rep = verify_axioms(S, points(S, 20))
    assert rep.all_passed, rep.failed
    assert rep["axioms.compatibility"].max_residual < 1e-8
    assert rep["axioms.contact"].max_residual < 1e-8


def test_corrupted_phi_fails_compatibility(ell2):
    S = ell2.with_fields(phi=ell2.phi.scaled(1.1))
    rep = verify_axioms(S, points(S, 10))
    assert rep["axioms.compatibility"].max_residual > 0.05
    assert rep["axioms.compatibility"].status == "fail"


# -- N tensors -------------------------------------------------------------

def test_n_tensors(ell2, rng):
    for p in points(ell2, 5):
        ls = ell2.local(p)
        X, Y, Z = (rng.normal(size=3) for _ in range(3))
        N = compute_N_tensors(ell2, p, X, Y, Z)
        assert np.max(np.abs(compute_N_tensors(ell2, p, X, X, Z).N1)) < 1e-12
        assert np.max(np.abs(N.N2)) < 1e-8
        assert np.max(np.abs(N.N4)) < 1e-8
        assert np.max(np.abs(N.N3)) < 1e-8
        assert hybrid_residual(ls.N_frame["N2"], 0.0) < 1e-8


def test_normality_distinguishes_sphere_from_ellipsoid(sphere, ell2):
    p_s, p_e = points(sphere, 1)[0], points(ell2, 1)[0]
    assert np.max(np.abs(sphere.local(p_s).N_frame["N1"])) < 1e-8
    assert np.max(np.abs(ell2.local(p_e).N_frame["N1"])) > 1e-3


# -- identity suites -------------------------------------------------------

@pytest.mark.parametrize("name", ["sphere", "ell2"])
def test_identity_suites_pass(name, request):
    S = request.getfixturevalue(name)
    pts = points(S, 20)
    for level in ("ContactMetric", "KContact"):
        rep = identity_suite(S, pts, level)
        assert rep.all_passed, [c.check_name for c in rep.failed]
    rep = identity_suite(S, pts, "KContact")
    assert rep.meta["min_gQXX"] > 0


def test_identity_suite_unknown_level(sphere):
    with pytest.raises(ValueError):
        identity_suite(sphere, points(sphere, 1), "Sasakian")


@pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
def test_full_nabla_phi_formula_on_random_triples(a, rng):
    e = ellipsoid(a)
    S = construct_from_killing(e.chart, e.xi)
    worst = max(eq31_random(S.local(p), 50, rng) for p in points(S, 10))
    assert worst < 1e-7


def test_six_term_n5_is_not_tensorial(ell2):
    # the six-term N5 expression breaks the nabla-phi identity on a weak structure;
    # the tensorial form restores it
    rep = identity_suite(ell2, points(ell2, 10), "ContactMetric")
    assert rep["contact.nabla_phi_formula"].passed
    ls = ell2.local(points(ell2, 1)[0])
    diff = ls.N_frame["N5"] - ls.N_frame["N5_six_term"]
    assert np.max(np.abs(diff)) > 1e-3


def test_trace_q_sphere(sphere):
    for p in points(sphere, 5):
        assert trace_Q(sphere.local(p)) == pytest.approx(2.0, abs=1e-8)


# -- Killing biconditional --------------------------------------------------

@pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
def test_killing_iff_nabla_xi_minus_phi(a):
    e = ellipsoid(a)
    S = construct_from_killing(e.chart, e.xi)
    for p in points(S, 10):
        ls = S.local(p)
        assert np.max(np.abs(ls.nabla_xi.value + ls.phi.value)) < 1e-8
        L = lie_derivative_metric(S.xi(p, 1), S.metric(p, 1)).value
        assert hybrid_residual(L, 0.0) < 1e-7


# -- homothety -------------------------------------------------------------

def test_homothety_identity(ell2):
    assert homothety(ell2, 1.0) is ell2
    with pytest.raises(ValueError):
        homothety(ell2, 0.0)


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_homothety_preserves_axioms_on_sphere(sphere, lam):
    T = homothety(sphere, lam)
    rep = verify_axioms(T, points(T, 5))
    assert rep["axioms.phi_squared"].max_residual < 1e-8
    assert rep["axioms.compatibility"].max_residual < 1e-8


def test_homothety_round_trip(ell2):
    back = homothety(homothety(ell2, 2.5), 1 / 2.5)
    for p in points(ell2, 3):
        for f in ("phi", "Q", "metric"):
            np.testing.assert_allclose(getattr(back, f).at(p), getattr(ell2, f).at(p), atol=1e-13)


def test_pointwise_homothety_reaches_classical(ell2):
    # on D the ellipsoid's Q is a pointwise multiple mu of the identity;
    # rescaling by mu gives a classical structure at that point
    p = points(ell2, 1)[0]
    ls = ell2.local(p)
    E = ls.E
    mu = float(np.mean([e @ ls.gv @ (ls.Q.value @ e) for e in E]))
    T = homothety(ell2, mu)
    c = classify(T, [p])
    assert c.level == LadderLevel.WeakKContact
    assert c.classical


# -- product extension -----------------------------------------------------

def test_product_extension(ell2, sphere, rng):
    p = points(ell2, 1)[0]
    xi = ell2.xi.at(p)
    assert product_extension_check(ell2, p, xi, 0.0) < 1e-12
    assert product_extension_check(ell2, p, np.zeros(3), 1.0) < 1e-12
    for q in points(ell2, 5):
        X, a = rng.normal(size=3), rng.normal()
        assert product_extension_check(ell2, q, X, a) < 1e-9


# -- Einstein diagnostic ---------------------------------------------------

def test_einstein_sphere(sphere):
    rep = einstein_diagnostic(sphere, points(sphere, 10))
    assert rep.meta["einstein"]["applicable"]
    assert rep.all_passed
    assert rep.meta["einstein"]["trQ_mean"] == pytest.approx(2.0, abs=1e-8)


def test_einstein_ellipsoid_not_applicable(ell2):
    rep = einstein_diagnostic(ell2, points(ell2, 10))
    meta = rep.meta["einstein"]
    assert not meta["applicable"]
    assert meta["trQ_std"] > 1e-3
    assert rep["einstein.ricci_eq_trQ_g"].status == "skipped"
