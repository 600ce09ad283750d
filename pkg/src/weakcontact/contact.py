"""Weak (almost) contact metric structures and their identities.

A :class:`WeakStructure` bundles the fields (phi, Q, xi, eta, g) on a chart.
All checks are evaluated pointwise on the g-orthonormal frame
``(xi, e_1, ..., e_2n)`` whose vectors are extended with constant chart
coefficients; every tensor compared is reduced to frame components before
taking the relative-absolute residual, so reports do not depend on the
coordinate scaling of the chart.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import jets
from .errors import DegenerateQ, NotKilling, NotUnit
from .jets import Jet, jeinsum
from .manifold import ChartManifold, Field, SamplePlan, full_frame, lie_bracket, sample_points
from .report import Check, CheckReport, aggregate, skipped
from .riemann import (
    covariant,
    directional,
    exterior_derivative,
    hybrid_residual,
    lie_derivative,
    local_geometry,
    nijenhuis,
    sectional_from,
)

__all__ = [
    "WeakStructure",
    "LadderLevel",
    "Classification",
    "LocalStructure",
    "verify_axioms",
    "compute_N_tensors",
    "NTensors",
    "classify",
    "construct_from_killing",
    "homothety",
    "identity_suite",
    "product_extension_check",
    "einstein_diagnostic",
    "trace_Q",
    "DEFAULT_TOL",
    "POSITIVITY",
]

DEFAULT_TOL = 1e-7
POSITIVITY = 1e-8


class LadderLevel(enum.IntEnum):
    NotWeakAlmostContact = 0
    WeakAlmostContact = 1
    WeakAlmostContactMetric = 2
    WeakContactMetric = 3
    WeakKContact = 4

    @property
    def label(self) -> str:
        return {
            0: "not weak almost contact",
            1: "weak almost contact",
            2: "weak almost contact metric",
            3: "weak contact metric",
            4: "weak K-contact",
        }[int(self)]


@dataclass(frozen=True)
class WeakStructure:
    """The quintuple (phi, Q, xi, eta, g) on a chart.

    ``metric`` defaults to the chart metric; ``order`` is the jet order at
    which the local geometry is expanded (3 gives every identity).
    """

    chart: ChartManifold
    phi: Field
    Q: Field
    xi: Field
    eta: Field
    metric: Field | None = None
    order: int = jets.MAX_ORDER
    name: str = ""

    def __post_init__(self):
        if self.metric is None:
            object.__setattr__(self, "metric", self.chart.metric)

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def n(self) -> int:
        return self.chart.n

    @functools.cached_property
    def Qtilde(self) -> Field:
        eye = np.eye(self.dim)
        return Field(lambda p, k: self.Q(p, k) - eye, "tensor11", "Qtilde")

    def local(self, p) -> "LocalStructure":
        key = tuple(np.asarray(p, dtype=float).tolist())
        cache = self.__dict__.setdefault("_local_cache", {})
        ls = cache.get(key)
        if ls is None:
            if len(cache) > 512:
                cache.clear()
            ls = LocalStructure(self, np.asarray(p, dtype=float))
            cache[key] = ls
        return ls

    def with_fields(self, **kw) -> "WeakStructure":
        clean = {k: v for k, v in self.__dict__.items() if k in self.__dataclass_fields__}
        clean.update(kw)
        return WeakStructure(**clean)


class LocalStructure:
    """Jets of a structure at one point plus its adapted orthonormal frame."""

    def __init__(self, S: WeakStructure, p: np.ndarray):
        self.S = S
        self.p = p
        k = S.order
        self.k = k
        self.geo = local_geometry(S.metric, p, k)
        self.g = self.geo.g
        self.phi = S.phi(p, k)
        self.Q = S.Q(p, k)
        self.Qt = self.Q - np.eye(S.dim)
        self.xi = S.xi(p, k)
        self.eta = S.eta(p, k)
        gv = self.g.value
        self.gv = gv
        self.F = full_frame(gv, self.xi.value)  # rows: xi-hat, e_1..e_2n
        self.E = self.F[1:]

    # -- frame components ------------------------------------------
    def fc_vec(self, v) -> np.ndarray:
        """Components ``g(F_b, v)`` (batched over leading axes of v)."""
        return np.einsum("bi,ij,...j->...b", self.F, self.gv, jets.value_of(v))

    def fc_cov(self, w) -> np.ndarray:
        return np.einsum("bi,...i->...b", self.F, jets.value_of(w))

    def fc_11(self, T) -> np.ndarray:
        return np.einsum("bi,ij,jk,ak->ba", self.F, self.gv, jets.value_of(T), self.F)

    def fc_bil(self, B) -> np.ndarray:
        return np.einsum("ai,ij,bj->ab", self.F, jets.value_of(B), self.F)

    # -- batched constant frame fields -----------------------------
    def frame_jet(self, shape_prefix=()) -> Jet:
        """Frame vectors as constant-coefficient fields of shape ``prefix + (m, m)``."""
        return Jet.constant(self.F.reshape(shape_prefix + self.F.shape), self.g.nvars, self.k)

    def slots(self, nargs: int):
        """Frame batches broadcasting to an ``(m,)*nargs`` grid of arguments."""
        m = self.S.dim
        out = []
        for a in range(nargs):
            shape = [1] * nargs
            shape[a] = m
            out.append(Jet.constant(self.F.reshape(tuple(shape) + (m,)), self.g.nvars, self.k))
        return out

    def apply(self, T: Jet, v):
        return jeinsum("ij,...j->...i", T, v)

    def inner(self, u, v):
        return jeinsum("ij,...i,...j->...", self.g, u, v)

    # -- derived jets ----------------------------------------------
    @functools.cached_property
    def nabla_xi(self) -> Jet:
        return covariant(self.geo, self.xi, "u")  # [a, i] = nabla_i xi^a

    @functools.cached_property
    def nabla_phi(self) -> Jet:
        return covariant(self.geo, self.phi, "ud")  # [a, b, i] = (nabla_i phi)^a_b

    @functools.cached_property
    def d_eta(self) -> Jet:
        return exterior_derivative(self.eta)

    @functools.cached_property
    def Phi(self) -> Jet:
        return jeinsum("ia,aj->ij", self.g, self.phi)

    @functools.cached_property
    def xi_batch(self) -> Jet:
        return self.xi

    # -- structure tensors (constant frame fields) ---
    def N1(self, X, Y):
        two_deta = 2.0 * jeinsum("ij,...i,...j->...", self.d_eta, X, Y)
        return nijenhuis(self.phi, X, Y) + jeinsum("...,i->...i", two_deta, self.xi)

    def lie_eta(self, V, W):
        """``(L_V eta)(W) = V(eta(W)) - eta([V, W])``."""
        return directional(V, jeinsum("i,...i->...", self.eta, W)) - jeinsum(
            "i,...i->...", self.eta, lie_bracket(V, W)
        )

    def N2(self, X, Y):
        return self.lie_eta(self.apply(self.phi, X), Y) - self.lie_eta(self.apply(self.phi, Y), X)

    def N3(self, X):
        xi = self.xi
        return lie_bracket(_bcast(xi, X), self.apply(self.phi, X)) - self.apply(
            self.phi, lie_bracket(_bcast(xi, X), X)
        )

    def N4(self, X):
        return self.lie_eta(_bcast(self.xi, X), X)

    def N5(self, X, Y, Z):
        """Tensorial form: the six-term expression plus ``X(g(phi Y, Qtilde Z))``.

        The six-term expression alone is not C-infinity-linear in ``Y`` and ``Z``
        (scaling ``Y`` by ``f`` leaves ``-X(f) g(phi Y, Qtilde Z)``); the extra
        term restores tensoriality and makes the nabla-phi formula hold.  It
        vanishes identically when ``Qtilde = 0`` or when ``Y`` or ``Z`` is ``xi``.
        """
        fix = directional(X, self.inner(self.apply(self.phi, Y), self.apply(self.Qt, Z)))
        return self.N5_six_term(X, Y, Z) + fix

    def N5_six_term(self, X, Y, Z):
        phi, Qt = self.phi, self.Qt
        pY, pZ = self.apply(phi, Y), self.apply(phi, Z)
        QtX, QtY, QtZ = self.apply(Qt, X), self.apply(Qt, Y), self.apply(Qt, Z)
        t1 = directional(pZ, self.inner(X, QtY))
        t2 = directional(pY, self.inner(X, QtZ))
        t3 = self.inner(lie_bracket(X, pZ), QtY)
        t4 = self.inner(lie_bracket(X, pY), QtZ)
        w = lie_bracket(Y, pZ) - lie_bracket(Z, pY) - self.apply(phi, lie_bracket(Y, Z))
        t5 = self.inner(w, QtX)
        return t1 - t2 + t3 - t4 + t5

    @functools.cached_property
    def N1_frame(self) -> np.ndarray:
        """N1 on frame pairs; needs one jet order less than the full table."""
        X2, Y2 = self.slots(2)
        return self.fc_vec(self.N1(X2, Y2))

    @functools.cached_property
    def N_frame(self) -> dict:
        """N-tensors on all frame tuples, in frame components."""
        X2, Y2 = self.slots(2)
        X3, Y3, Z3 = self.slots(3)
        (X1,) = self.slots(1)
        return {
            "N1": self.N1_frame,
            "N2": jets.value_of(self.N2(X2, Y2)),
            "N3": self.fc_vec(self.N3(X1)),
            "N4": jets.value_of(self.N4(X1)),
            "N5": jets.value_of(self.N5(X3, Y3, Z3)),
            "N5_six_term": jets.value_of(self.N5_six_term(X3, Y3, Z3)),
        }


def _bcast(field_jet: Jet, like: Jet) -> Jet:
    """Broadcast an unbatched vector jet against a batched one."""
    shape = like.shape[:-1] + field_jet.shape
    return Jet(np.broadcast_to(field_jet.coeffs, shape + field_jet.coeffs.shape[-1:]), field_jet.nvars, field_jet.order)


@dataclass(frozen=True)
class NTensors:
    """Values of N1(X,Y) (vector), N2(X,Y), N3(X) (vector), N4(X), N5(X,Y,Z).

    ``N5`` is the six-term expression, ``N5_tensorial`` the
    corrected tensor (see :meth:`LocalStructure.N5`).
    """

    N1: np.ndarray
    N2: float
    N3: np.ndarray
    N4: float
    N5: float
    N5_tensorial: float


def compute_N_tensors(S: WeakStructure, p, X, Y, Z) -> NTensors:
    """The five N-tensors at ``p`` for vectors extended with constant coefficients."""
    ls = S.local(p)
    X, Y, Z = (Jet.constant(np.asarray(v, dtype=float), ls.g.nvars, ls.k) for v in (X, Y, Z))
    return NTensors(
        ls.N1(X, Y).value,
        float(ls.N2(X, Y).value),
        ls.N3(X).value,
        float(ls.N4(X).value),
        float(ls.N5_six_term(X, Y, Z).value),
        float(ls.N5(X, Y, Z).value),
    )


# ---------------------------------------------------------------------------
# axioms and classification
# ---------------------------------------------------------------------------

def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _positivity(min_value: float, threshold: float = POSITIVITY) -> float:
    return max(0.0, threshold - float(min_value))


def _q_min_on_D(ls: LocalStructure) -> float:
    """Smallest g(QX, X) over unit X in D."""
    A = ls.fc_11(ls.Q)[1:, 1:]
    return float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])


def _qtilde_norm(ls: LocalStructure) -> float:
    A = ls.fc_11(ls.Qt)
    return float(np.linalg.norm(A, 2))


# name, anchor, residual function, level, is-positivity
_AXIOMS: list = [
    ("eta_xi", "eta(xi) = 1", lambda ls: hybrid_residual(ls.eta.value @ ls.xi.value, 1.0), 1),
    ("Q_xi", "Q xi = xi", lambda ls: hybrid_residual(ls.fc_vec(ls.Q.value @ ls.xi.value), ls.fc_vec(ls.xi)), 1),
    (
        "phi_squared",
        "phi^2 = -Q + eta (x) xi",
        lambda ls: hybrid_residual(
            ls.fc_11(ls.phi.value @ ls.phi.value),
            ls.fc_11(-ls.Q.value + np.outer(ls.xi.value, ls.eta.value)),
        ),
        1,
    ),
    (
        "D_invariance",
        "phi D subset D",
        lambda ls: hybrid_residual(ls.eta.value @ ls.phi.value @ ls.E.T, 0.0),
        1,
    ),
    ("phi_xi", "phi xi = 0", lambda ls: hybrid_residual(ls.fc_vec(ls.phi.value @ ls.xi.value), 0.0), 1),
    ("eta_phi", "eta o phi = 0", lambda ls: hybrid_residual(ls.fc_cov(ls.eta.value @ ls.phi.value), 0.0), 1),
    ("eta_Q", "eta o Q = eta", lambda ls: hybrid_residual(ls.fc_cov(ls.eta.value @ ls.Q.value), ls.fc_cov(ls.eta)), 1),
    (
        "Q_phi_commute",
        "[Q, phi] = 0",
        lambda ls: hybrid_residual(ls.fc_11(ls.Q.value @ ls.phi.value), ls.fc_11(ls.phi.value @ ls.Q.value)),
        1,
    ),
    (
        "compatibility",
        "g(phi X, phi Y) = g(X, QY) - eta(X) eta(Y)",
        lambda ls: hybrid_residual(
            ls.fc_bil(ls.phi.value.T @ ls.gv @ ls.phi.value),
            ls.fc_bil(ls.gv @ ls.Q.value - np.outer(ls.eta.value, ls.eta.value)),
        ),
        2,
    ),
    ("eta_dual", "eta(X) = g(xi, X)", lambda ls: hybrid_residual(ls.fc_cov(ls.eta), ls.fc_cov(ls.gv @ ls.xi.value)), 2),
    (
        "phi_skew",
        "g(phi X, Y) = -g(X, phi Y)",
        lambda ls: hybrid_residual(ls.fc_bil(ls.gv @ ls.phi.value), -ls.fc_bil(ls.gv @ ls.phi.value).T),
        2,
    ),
    (
        "Q_selfadjoint",
        "g(QX, Y) = g(X, QY)",
        lambda ls: hybrid_residual(ls.fc_bil(ls.gv @ ls.Q.value), ls.fc_bil(ls.gv @ ls.Q.value).T),
        2,
    ),
    ("contact", "Phi = d eta", lambda ls: hybrid_residual(ls.fc_bil(ls.Phi), ls.fc_bil(ls.d_eta)), 3),
    (
        "killing",
        "L_xi g = 0",
        lambda ls: hybrid_residual(ls.fc_bil(lie_derivative(ls.xi, ls.g, "dd")), 0.0),
        4,
    ),
]

# positivity-type gates: residual is max(0, threshold - min), tolerance 0
_POSITIVE = [
    ("Q_positive", "g(X, QX) > 0 on D", lambda ls: _positivity(_q_min_on_D(ls)), 2),
]


def _points(S: WeakStructure, points):
    if points is None:
        return sample_points(S.chart, SamplePlan())
    return np.atleast_2d(np.asarray(points, dtype=float))


def _run(S, points, specs, prefix: str, tol: float, positive=()) -> CheckReport:
    rep = CheckReport()
    locs = [S.local(p) for p in points]
    for name, anchor, fn, *_ in specs:
        rep.add(aggregate(f"{prefix}.{name}", anchor, [fn(ls) for ls in locs], tol))
    for name, anchor, fn, *_ in positive:
        rep.add(aggregate(f"{prefix}.{name}", anchor, [fn(ls) for ls in locs], 0.0))
    return rep


def verify_axioms(S: WeakStructure, points=None, tol: float = DEFAULT_TOL) -> CheckReport:
    """Residual of every defining identity of a weak contact metric structure."""
    pts = _points(S, points)
    specs = [s for s in _AXIOMS if s[0] != "killing"]
    return _run(S, pts, specs, "axioms", tol, _POSITIVE)


@dataclass
class Classification:
    level: LadderLevel
    normal: bool
    classical: bool
    residuals: dict = field(default_factory=dict)
    qtilde_norms: np.ndarray | None = None

    def describe(self) -> str:
        return f"{self.level.label} (classical: {'yes' if self.classical else 'no'})"


def classify(S: WeakStructure, points=None, tol: float = DEFAULT_TOL) -> Classification:
    """Highest ladder level whose residual suite (and all lower ones) passes."""
    pts = _points(S, points)
    locs = [S.local(p) for p in pts]
    worst: dict = {}
    level_ok = {lvl: True for lvl in range(1, 5)}
    for name, _anchor, fn, lvl in _AXIOMS:
        r = max(fn(ls) for ls in locs)
        worst[name] = r
        if not r <= tol:
            level_ok[lvl] = False
    for name, _anchor, fn, lvl in _POSITIVE:
        r = max(fn(ls) for ls in locs)
        worst[name] = r
        if not r <= 0.0:
            level_ok[lvl] = False
    level = LadderLevel.NotWeakAlmostContact
    for lvl in range(1, 5):
        if not level_ok[lvl]:
            break
        level = LadderLevel(lvl)
    n1 = max(hybrid_residual(ls.N1_frame, 0.0) for ls in locs)
    qn = np.array([_qtilde_norm(ls) for ls in locs])
    worst["N1"] = n1
    return Classification(level, bool(n1 < tol), bool(qn.max() < tol), worst, qn)


# ---------------------------------------------------------------------------
# construction, homothety, product extension
# ---------------------------------------------------------------------------

def construct_from_killing(
    chart: ChartManifold,
    xi: Field,
    *,
    probe: SamplePlan | Sequence | None = None,
    metric: Field | None = None,
    unit_tol: float = 1e-8,
    killing_tol: float = 1e-8,
    positivity: float = POSITIVITY,
    order: int = jets.MAX_ORDER,
) -> WeakStructure:
    """Weak K-contact structure of a unit Killing field with positive xi-curvature.

    ``eta = g(., xi)``, ``phi = -nabla xi`` and ``QX = R(X, xi)xi + eta(X) xi``
    (the curvature formula on ker eta, closed by ``Q xi = xi``).  The three
    hypotheses are verified at the probe points; a violation raises
    :class:`NotUnit`, :class:`NotKilling` or :class:`DegenerateQ`.
    """
    metric = chart.metric if metric is None else metric

    def eta_fn(p, k):
        return jeinsum("ij,j->i", metric(p, k), xi(p, k))

    def phi_fn(p, k):
        geo = local_geometry(metric, p, order)
        return -covariant(geo, xi(p, order), "u")

    def Q_fn(p, k):
        geo = local_geometry(metric, p, order)
        x = xi(p, order)
        curv = jeinsum("lkij,k,j->li", geo.riemann, x, x)
        return curv + jeinsum("l,i->li", x, eta_fn(p, order))

    S = WeakStructure(
        chart,
        phi=Field(phi_fn, "tensor11", "phi"),
        Q=Field(Q_fn, "tensor11", "Q"),
        xi=xi,
        eta=Field(eta_fn, "covector", "eta"),
        metric=metric,
        order=order,
        name=f"killing({chart.name})",
    )

    if probe is None:
        probe = SamplePlan(count=20)
    pts = sample_points(chart, probe) if isinstance(probe, SamplePlan) else np.atleast_2d(probe)
    for p in pts:
        g = metric(p, 0).value
        x = xi(p, 0).value
        unit = abs(float(x @ g @ x) - 1.0)
        if unit > unit_tol:
            raise NotUnit(f"|g(xi, xi) - 1| = {unit:.3e} at {p.tolist()}", unit)
    for p in pts:
        geo = local_geometry(metric, p, 1)
        kill = hybrid_residual(lie_derivative(xi(p, 1), geo.g, "dd").value, 0.0)
        if kill > killing_tol:
            raise NotKilling(f"L_xi g residual {kill:.3e} at {p.tolist()}", kill)
    for p in pts:
        qmin = _q_min_on_D(S.local(p))
        if qmin <= positivity:
            raise DegenerateQ(f"xi-sectional curvature {qmin:.3e} <= {positivity:g} at {p.tolist()}", qmin)
    return S


def homothety(S: WeakStructure, lam: float) -> WeakStructure:
    """The structure (phi', Q', xi, eta, g') homothetic to ``S`` with factor ``lam``.

    ``phi' = lam^{-1/2} phi``, ``Q' = lam^{-1} Q`` on ker eta with
    ``Q' xi = xi``, and ``g' = sqrt(lam) g`` on ker eta with
    ``g'(xi, .) = g(xi, .)``.  ``S`` should be at least weak almost contact
    metric for the output to be meaningful.
    """
    if not lam > 0:
        raise ValueError(f"homothety factor must be positive, got {lam}")
    if lam == 1:
        return S
    s = float(np.sqrt(lam))
    phi, Q, xi, eta, g = S.phi, S.Q, S.xi, S.eta, S.metric

    def q_new(p, k):
        proj = jeinsum("i,j->ij", xi(p, k), eta(p, k))
        return (Q(p, k) - proj) * (1.0 / lam) + proj

    def g_new(p, k):
        e = eta(p, k)
        ee = jeinsum("i,j->ij", e, e)
        return (g(p, k) - ee) * s + ee

    return S.with_fields(
        phi=Field(lambda p, k: phi(p, k) * (1.0 / s), "tensor11", "phi'"),
        Q=Field(q_new, "tensor11", "Q'"),
        metric=Field(g_new, "bilinear", "g'"),
        name=f"{S.name}~{lam:g}",
    )


def product_extension_check(S: WeakStructure, p, X, a: float) -> float:
    """``|phibar^2 (X, a d_t) + Qbar (X, a d_t)|`` on ``M x R``.

    ``phibar(X, a d_t) = (phi X - a xi, eta(X) d_t)`` and
    ``Qbar(X, a d_t) = (QX, a d_t)``; the norm is the product metric norm.
    """
    ls = S.local(p)
    phi, Q, xi, eta = ls.phi.value, ls.Q.value, ls.xi.value, ls.eta.value
    X = np.asarray(X, dtype=float)

    def phibar(v, t):
        return phi @ v - t * xi, float(eta @ v)

    v1, t1 = phibar(X, a)
    v2, t2 = phibar(v1, t1)
    rv, rt = v2 + Q @ X, t2 + a
    return float(np.sqrt(max(rv @ ls.gv @ rv, 0.0) + rt**2))


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------

def _eq31(ls: LocalStructure) -> float:
    X, Y, Z = ls.slots(3)
    lhs = ls.inner(jeinsum("abi,...i,...b->...a", ls.nabla_phi, X, Y), Z)
    return _eq31_compare(ls, X, Y, Z, lhs)


def _eq31_compare(ls, X, Y, Z, lhs) -> float:
    pX = ls.apply(ls.phi, X)
    eta = lambda v: jeinsum("i,...i->...", ls.eta, v)
    rhs = (
        0.5 * ls.inner(ls.N1(Y, Z), pX)
        + ls.inner(pX, ls.apply(ls.phi, Y)) * eta(Z)
        - ls.inner(pX, ls.apply(ls.phi, Z)) * eta(Y)
        + 0.5 * ls.N5(X, Y, Z)
    )
    return hybrid_residual(lhs, rhs)


def eq31_random(ls: LocalStructure, count: int, rng: np.random.Generator) -> float:
    """Full nabla-phi formula on ``count`` random unit-vector triples."""
    m = ls.S.dim
    vs = []
    for _ in range(3):
        c = rng.standard_normal((count, m))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        vs.append(Jet.constant(c @ ls.F, ls.g.nvars, ls.k))
    X, Y, Z = vs
    lhs = ls.inner(jeinsum("abi,...i,...b->...a", ls.nabla_phi, X, Y), Z)
    return _eq31_compare(ls, X, Y, Z, lhs)


def _nabla_xi_phi_vs_N5(ls):
    Y, Z = ls.slots(2)
    lhs = ls.inner(jeinsum("abi,i,...b->...a", ls.nabla_phi, ls.xi, Y), Z)
    X = _bcast(ls.xi, Y)
    return hybrid_residual(lhs, 0.5 * ls.N5(X, Y, Z))


def _kk1(ls):
    X, Z = ls.slots(2)
    xi = _bcast(ls.xi, X)
    lhs = ls.N5(X, xi, Z)
    (Z1,) = ls.slots(1)
    n3 = ls.N3(Z)
    rhs = ls.inner(n3, ls.apply(ls.Qt, X))
    return hybrid_residual(lhs, rhs)


def _kk2(ls):
    Y, Z = ls.slots(2)
    xi = _bcast(ls.xi, Y)
    lhs = ls.N5_six_term(xi, Y, Z)
    rhs = ls.inner(lie_bracket(xi, ls.apply(ls.phi, Z)), ls.apply(ls.Qt, Y)) - ls.inner(
        lie_bracket(xi, ls.apply(ls.phi, Y)), ls.apply(ls.Qt, Z)
    )
    return hybrid_residual(lhs, rhs)


def _kk3(ls):
    (Z,) = ls.slots(1)
    xi = _bcast(ls.xi, Z)
    a = ls.N5(xi, xi, Z)
    b = ls.N5(xi, Z, xi)
    return hybrid_residual(np.concatenate([jets.value_of(a), jets.value_of(b)]), 0.0)


def _dphi_three(ls):
    dPhi = covariant(ls.geo, ls.Phi, "dd").value  # [a, b, i] = (nabla_i Phi)_ab
    F = ls.F
    T = np.einsum("abi,xi,ya,zb->xyz", dPhi, F, F, F)  # (nabla_X Phi)(Y, Z)
    cyc = T + T.transpose(1, 2, 0) + T.transpose(2, 0, 1)
    return hybrid_residual(cyc, 0.0) if np.max(np.abs(T)) == 0 else float(
        np.max(np.abs(cyc)) / (1.0 + np.max(np.abs(T)))
    )


def _nonintegrability(ls):
    (X,) = ls.slots(1)
    E = X[1:]
    # sections of D: project the constant frame onto ker eta as fields
    E = E - jeinsum("...,i->...i", jeinsum("i,...i->...", ls.eta, E), ls.xi)
    pX = ls.apply(ls.phi, E)
    lhs = jeinsum("...i,i->...", lie_bracket(E, pX), jeinsum("ij,j->i", ls.g, ls.xi))
    rhs = 2.0 * jeinsum("ij,...i,...j->...", ls.d_eta, pX, E)
    return hybrid_residual(lhs, rhs)


def _nonintegrability_metric(ls):
    (X,) = ls.slots(1)
    E = X[1:]
    E = E - jeinsum("...,i->...i", jeinsum("i,...i->...", ls.eta, E), ls.xi)
    pX = ls.apply(ls.phi, E)
    lhs = jeinsum("...i,i->...", lie_bracket(E, pX), jeinsum("ij,j->i", ls.g, ls.xi))
    return hybrid_residual(lhs, 2.0 * ls.inner(pX, pX))


def _nonintegrability_positive(ls):
    pE = ls.phi.value @ ls.E.T
    vals = np.einsum("ia,ij,ja->a", pE, ls.gv, pE)
    return _positivity(vals.min())


_CONTACT_SPECS = [
    ("N2_vanishes", "N2 = 0", lambda ls: hybrid_residual(ls.N_frame["N2"], 0.0)),
    ("N4_vanishes", "N4 = 0", lambda ls: hybrid_residual(ls.N_frame["N4"], 0.0)),
    ("xi_geodesic", "nabla_xi xi = 0", lambda ls: hybrid_residual(ls.fc_vec(ls.nabla_xi.value @ ls.xi.value), 0.0)),
    (
        "nabla_phi_formula",
        "g((nabla_X phi)Y, Z) = 1/2 g(N1(Y,Z), phi X) + g(phi X, phi Y) eta(Z) - g(phi X, phi Z) eta(Y) + 1/2 N5(X,Y,Z)",
        _eq31,
    ),
    ("nabla_xi_phi_N5", "g((nabla_xi phi)Y, Z) = 1/2 N5(xi, Y, Z)", _nabla_xi_phi_vs_N5),
    ("N5_X_xi_Z", "N5(X, xi, Z) = g(N3(Z), Qtilde X)", _kk1),
    ("N5_xi_Y_Z", "N5(xi, Y, Z) = g([xi, phi Z], Qtilde Y) - g([xi, phi Y], Qtilde Z)", _kk2),
    ("N5_xi_xi", "N5(xi, xi, Z) = N5(xi, Y, xi) = 0", _kk3),
    ("dPhi_cyclic", "(nabla_X Phi)(Y,Z) + (nabla_Y Phi)(Z,X) + (nabla_Z Phi)(X,Y) = 0", _dphi_three),
    ("nonintegrability", "g([X, phi X], xi) = 2 d eta(phi X, X)", _nonintegrability),
    ("nonintegrability_metric", "g([X, phi X], xi) = 2 g(phi X, phi X) on sections of D", _nonintegrability_metric),
]
_CONTACT_POSITIVE = [
    ("nonintegrability_positive", "g(phi X, phi X) > 0 on D", _nonintegrability_positive),
]


def _E30(ls):
    return hybrid_residual(ls.fc_11(ls.nabla_xi), ls.fc_11(-ls.phi.value))


def _E30phi(ls):
    T = np.einsum("abi,i->ab", ls.nabla_phi.value, ls.xi.value)
    return hybrid_residual(ls.fc_11(T), 0.0)


def _E31(ls):
    N5 = ls.N_frame["N5"]
    # frame vector 0 is xi itself
    return hybrid_residual(np.concatenate([N5[0].ravel(), N5[:, 0].ravel()]), 0.0)


def _E31A_lie(ls):
    return hybrid_residual(ls.fc_11(lie_derivative(ls.xi, ls.Qt, "ud")), 0.0)


def _E31A_nabla(ls):
    T = np.einsum("abi,i->ab", covariant(ls.geo, ls.Qt, "ud").value, ls.xi.value)
    return hybrid_residual(ls.fc_11(T), 0.0)


def _N1_xi(ls):
    (Y,) = ls.slots(1)
    return hybrid_residual(ls.fc_vec(ls.N1(_bcast(ls.xi, Y), Y)), 0.0)


def _ER0(ls):
    F = ls.F
    R = ls.geo.riemann.value  # [l, k, i, j]
    lhs = np.einsum("lkij,i,xj,yk->xyl", R, ls.xi.value, F, F)  # R(xi, X)Y
    rhs = np.einsum("abi,xi,yb->xya", ls.nabla_phi.value, F, F)  # (nabla_X phi)Y
    return hybrid_residual(ls.fc_vec(lhs), ls.fc_vec(rhs))


def _ER1(ls):
    F = ls.F
    x = ls.xi.value
    lhs = ls.geo.curvature(F, x, x)
    phi = ls.phi.value
    rhs = -np.einsum("ij,jk,xk->xi", phi, phi, F)
    return hybrid_residual(ls.fc_vec(lhs), ls.fc_vec(rhs))


def _ric_xixi(ls):
    x = ls.xi.value
    return float(x @ ls.geo.ricci.value @ x)


def trace_Q(ls: LocalStructure) -> float:
    """``tr Q`` over D, i.e. ``sum g(Q e_i, e_i)`` on an orthonormal frame of ker eta."""
    return float(np.einsum("xi,ij,jk,xk->", ls.E, ls.gv, ls.Q.value, ls.E))


def _ER1b_ric(ls):
    return hybrid_residual(_ric_xixi(ls), trace_Q(ls))


def _ER1b_trace(ls):
    return hybrid_residual(trace_Q(ls), 2 * ls.S.n + np.trace(ls.Qt.value))


def _EKmix(ls):
    x = ls.xi.value
    ks = np.array([sectional_from(ls.geo, x, e) for e in ls.E])
    q = np.einsum("xi,ij,jk,xk->x", ls.E, ls.gv, ls.Q.value, ls.E)
    return hybrid_residual(ks, q)


def _EKmix_positive(ls):
    return _positivity(_q_min_on_D(ls))


def _ricci_sharp_xi(ls):
    ric_sharp = np.linalg.solve(ls.gv, ls.geo.ricci.value @ ls.xi.value)
    rhs = np.einsum("abi,xi,xb->a", ls.nabla_phi.value, ls.E, ls.E)
    return hybrid_residual(ls.fc_vec(ric_sharp), ls.fc_vec(rhs))


_KCONTACT_SPECS = [
    ("killing", "L_xi g = 0", lambda ls: hybrid_residual(ls.fc_bil(lie_derivative(ls.xi, ls.g, "dd")), 0.0)),
    ("nabla_xi_eq_minus_phi", "nabla xi = -phi", _E30),
    ("nabla_xi_phi_vanishes", "nabla_xi phi = 0", _E30phi),
    ("N5_xi_slots_vanish", "N5(xi, ., .) = N5(., xi, .) = 0", _E31),
    ("lie_xi_Qtilde", "L_xi Qtilde = 0", _E31A_lie),
    ("nabla_xi_Qtilde", "nabla_xi Qtilde = 0", _E31A_nabla),
    ("N1_xi_vanishes", "N1(xi, .) = 0", _N1_xi),
    ("N3_vanishes", "N3 = 0 iff xi Killing", lambda ls: hybrid_residual(ls.N_frame["N3"], 0.0)),
    ("d_eta_xi", "d eta(xi, .) = 0", lambda ls: hybrid_residual(ls.fc_bil(ls.d_eta)[0], 0.0)),
    ("lie_xi_eta", "L_xi eta = 0", lambda ls: hybrid_residual(ls.N_frame["N4"], 0.0)),
    ("R_xi_X_Y", "R(xi, X)Y = (nabla_X phi)Y", _ER0),
    ("R_X_xi_xi", "R(X, xi)xi = -phi^2 X", _ER1),
    ("ric_xi_xi_trQ", "Ric(xi, xi) = tr Q (trace over D)", _ER1b_ric),
    ("trQ_split", "tr Q = 2n + tr Qtilde", _ER1b_trace),
    ("xi_sectional_eq_gQ", "K(xi, X) = g(QX, X)", _EKmix),
    ("ricci_sharp_xi", "Ric#(xi) = sum (nabla_{e_i} phi) e_i", _ricci_sharp_xi),
]
_KCONTACT_POSITIVE = [
    ("xi_sectional_positive", "K(xi, X) > 0", _EKmix_positive),
]


def identity_suite(S: WeakStructure, points=None, level: str = "KContact", tol: float = DEFAULT_TOL) -> CheckReport:
    """Named residuals of the contact-metric or K-contact identities.

    ``level`` is ``"ContactMetric"`` or ``"KContact"``.  Besides residuals the
    K-contact report records the minimum of ``g(QX, X)`` and of
    ``Ric(xi, xi)`` in ``meta``.
    """
    pts = _points(S, points)
    if level == "ContactMetric":
        return _run(S, pts, _CONTACT_SPECS, "contact", tol, _CONTACT_POSITIVE)
    if level == "KContact":
        rep = _run(S, pts, _KCONTACT_SPECS, "kcontact", tol, _KCONTACT_POSITIVE)
        locs = [S.local(p) for p in pts]
        rep.meta["min_gQXX"] = min(_q_min_on_D(ls) for ls in locs)
        rep.meta["min_ric_xi_xi"] = min(_ric_xixi(ls) for ls in locs)
        return rep
    raise ValueError(f"unknown identity level {level!r}")


# ---------------------------------------------------------------------------
# Einstein diagnostic
# ---------------------------------------------------------------------------

def einstein_diagnostic(S: WeakStructure, points=None, tol: float = DEFAULT_TOL, *, require_kcontact: bool = True) -> CheckReport:
    """Parallel-Ricci diagnostic: Einstein with scalar curvature (2n+1) tr Q.

    Hypotheses (``(nabla Ric)(xi, .) = 0`` and constant ``tr Q``) are measured
    and stored in ``meta['einstein']``; the conclusions are asserted only when
    both hold, otherwise they are reported as skipped.
    """
    from .riemann import nabla_ricci_contracted

    pts = _points(S, points)
    rep = CheckReport()
    names = ("einstein.ricci_eq_trQ_g", "einstein.scalar_eq_2n1_trQ")
    anchors = ("Ric = (tr Q) g", "tau = (2n+1) tr Q")
    if require_kcontact:
        cls = classify(S, pts[: min(len(pts), 10)], tol)
        if cls.level < LadderLevel.WeakKContact:
            rep.meta["einstein"] = {"applicable": False, "reason": f"structure is {cls.level.label}"}
            for nm, an in zip(names, anchors):
                rep.add(skipped(nm, an, tol, "precondition: structure is not weak K-contact"))
            return rep
    locs = [S.local(p) for p in pts]
    n = S.n
    nab, trq, ric_res, tau_res = [], [], [], []
    for ls in locs:
        M, v = nabla_ricci_contracted(ls.geo, ls.xi)
        F = ls.F
        MF = F @ M @ F.T  # frame components (nabla_Y Ric)(xi, Z)
        nab.append(float(np.max(np.abs(MF))))
        tq = trace_Q(ls)
        trq.append(tq)
        ric = ls.geo.ricci.value
        ric_res.append(hybrid_residual(ls.fc_bil(ric), ls.fc_bil(tq * ls.gv)))
        tau = float(ls.geo.scalar.value)
        tau_res.append(abs(tau - (2 * n + 1) * tq))
    nab_max = max(nab)
    trq_std = float(np.std(trq))
    applicable = nab_max < tol and trq_std < tol
    rep.meta["einstein"] = {
        "applicable": bool(applicable),
        "nabla_ric_xi_max": nab_max,
        "trQ_mean": float(np.mean(trq)),
        "trQ_std": trq_std,
        "ricci_residual_max": max(ric_res),
        "scalar_residual_max": max(tau_res),
    }
    if applicable:
        rep.add(aggregate(names[0], anchors[0], ric_res, tol))
        rep.add(aggregate(names[1], anchors[1], tau_res, max(tol, 1e-6)))
    else:
        why = f"hypotheses not met: max|(nabla Ric)(xi,.)|={nab_max:.3e}, std(tr Q)={trq_std:.3e}"
        for nm, an in zip(names, anchors):
            rep.add(skipped(nm, an, tol, why))
    return rep
