"""Generalized (gradient) Ricci soliton residuals and the lemma chain behind them.

Equations, with ``Hess_f = 1/2 L_{grad f} g``::

    1/2 L_X g   = -c1 X_flat (x) X_flat + c2 Ric + lam g     (vector field X)
    Hess_f      = -c1 df (x) df          + c2 Ric + lam g     (potential f)
    Hess_{f1}   = -c1 df2 (x) df2        + c2 Ric + lam g     (two potentials)

``X_flat`` is ``g(X, .)`` at the point; there is no separate type for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import jets
from .contact import DEFAULT_TOL, LadderLevel, WeakStructure, classify
from .errors import InvalidConfig
from .jets import Jet, jeinsum
from .manifold import Field, SamplePlan, sample_points
from .report import CheckReport, aggregate, skipped
from .riemann import covariant, directional, gradient, hessian, hybrid_residual, lie_derivative

__all__ = [
    "SolitonParams",
    "VectorFieldData",
    "Potential",
    "TwoPotentials",
    "QuasiEinsteinParams",
    "LemmaOutcome",
    "soliton_residual",
    "soliton_check",
    "ric_xi_D",
    "lemma_checks",
    "theorem51_diagnostic",
    "quasi_einstein_residual",
    "reduced_residual",
    "soliton_constant",
    "random_potential",
]


@dataclass(frozen=True)
class SolitonParams:
    c1: float = 0.0
    c2: float = 0.0
    lam: float = 0.0

    def __add__(self, other: "SolitonParams") -> "SolitonParams":
        return SolitonParams(self.c1 + other.c1, self.c2 + other.c2, self.lam + other.lam)

    def __mul__(self, s: float) -> "SolitonParams":
        return SolitonParams(s * self.c1, s * self.c2, s * self.lam)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorFieldData:
    X: Field


@dataclass(frozen=True)
class Potential:
    f: Field


@dataclass(frozen=True)
class TwoPotentials:
    f1: Field
    f2: Field


SolitonData = Union[VectorFieldData, Potential, TwoPotentials]


@dataclass(frozen=True)
class QuasiEinsteinParams:
    a: float
    b: float
    mu: Field


@dataclass
class LemmaOutcome:
    name: str
    residual: float | None
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.residual is None


def _geo_k(S: WeakStructure, p):
    ls = S.local(p)
    return ls, ls.geo, ls.k


def _sides(S: WeakStructure, data, params: SolitonParams, p):
    """Left and right side of the soliton equation as coordinate bilinear values."""
    ls, geo, k = _geo_k(S, p)
    g = ls.gv
    ric = geo.ricci.value
    if isinstance(data, VectorFieldData):
        X = data.X(p, k)
        lhs = 0.5 * lie_derivative(X, geo.g, "dd").value
        flat = g @ X.value
        quad = np.outer(flat, flat)
    elif isinstance(data, Potential):
        f = data.f(p, k)
        lhs = hessian(geo, f).value
        df = f.grad().value
        quad = np.outer(df, df)
    elif isinstance(data, TwoPotentials):
        lhs = hessian(geo, data.f1(p, k)).value
        df = data.f2(p, k).grad().value
        quad = np.outer(df, df)
    else:
        raise TypeError(f"unsupported soliton data {type(data).__name__}")
    rhs = -params.c1 * quad + params.c2 * ric + params.lam * g
    return lhs, rhs


def soliton_residual(S: WeakStructure, data, params: SolitonParams, p) -> np.ndarray:
    """Left minus right side of the soliton equation (symmetric, coordinates)."""
    lhs, rhs = _sides(S, data, params, np.asarray(p, dtype=float))
    return lhs - rhs


def soliton_check(S: WeakStructure, data, params: SolitonParams, p) -> float:
    """Hybrid residual of the soliton equation in frame components."""
    p = np.asarray(p, dtype=float)
    ls = S.local(p)
    lhs, rhs = _sides(S, data, params, p)
    return hybrid_residual(ls.fc_bil(lhs), ls.fc_bil(rhs))


def ric_xi_D(S: WeakStructure, p) -> float:
    """``max |Ric(xi, e_i)|`` over the D-frame, hybrid-normalised."""
    ls = S.local(np.asarray(p, dtype=float))
    vals = ls.E @ ls.geo.ricci.value @ ls.xi.value
    return hybrid_residual(vals, 0.0)


def soliton_constant(S: WeakStructure, params: SolitonParams, p) -> float:
    """``lam + 2 c2 n + c2 tr Qtilde`` at ``p``."""
    ls = S.local(np.asarray(p, dtype=float))
    return params.lam + 2 * params.c2 * S.n + params.c2 * float(np.trace(ls.Qt.value))


def _gnorm(ls, v) -> float:
    return float(np.sqrt(max(v @ ls.gv @ v, 0.0)))


def _field_of(data, geo, k, p):
    """Vector field used in the Lie-derivative lemma: X, grad f or grad f1."""
    if isinstance(data, VectorFieldData):
        return data.X(p, k)
    f = data.f if isinstance(data, Potential) else data.f1
    return gradient(geo, f(p, k))


def _potentials(data):
    if isinstance(data, Potential):
        return data.f, data.f
    if isinstance(data, TwoPotentials):
        return data.f1, data.f2
    return None


def lemma_checks(
    S: WeakStructure,
    data,
    p,
    Y=None,
    params: SolitonParams | None = None,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Residuals of the soliton lemmas at ``p`` for a direction ``Y`` orthogonal to xi.

    ``L51``  ``(L_xi L_X g)(Y, xi) = g(X, Y) + g(nabla_xi nabla_xi X, Y) + Y g(nabla_xi X, xi)``
    ``L51Q`` the same with ``g(QX, Y)`` in place of ``g(X, Y)``
    ``L52``  ``L_xi(df (x) df)(Y, xi) = Y(xi f) xi(f) + Y(f) xi(xi f)``
    ``L53``  ``nabla_xi grad f1 = a xi - c1 xi(f2) grad f2`` with ``a = lam + 2 c2 n + c2 tr Qtilde``

    The first form is exact only where ``Q X = X`` on the relevant
    component; the derivation for weak structures produces ``g(QX, Y)``.
    Precondition failures are returned as skipped outcomes.
    """
    p = np.asarray(p, dtype=float)
    ls, geo, k = _geo_k(S, p)
    xi = ls.xi
    x = xi.value
    if Y is None:
        Y = ls.E[0]
    Y = np.asarray(Y, dtype=float)
    out: dict = {}

    eta_Y = abs(float(ls.eta.value @ Y)) / max(_gnorm(ls, Y), 1e-300)
    killing = hybrid_residual(ls.fc_bil(lie_derivative(xi, geo.g, "dd")), 0.0)
    killing = max(killing, hybrid_residual(ls.fc_11(ls.nabla_xi), ls.fc_11(-ls.phi.value)))

    # second Lie derivative along xi, identity and weak forms
    X = _field_of(data, geo, k, p) if data is not None else None
    reason = None
    if X is None:
        reason = "no vector field or potential given"
    elif eta_Y > 1e-10:
        reason = f"Y is not orthogonal to xi (|eta(Y)|={eta_Y:.2e})"
    elif killing > tol:
        reason = f"structure is not weak K-contact at p (residual {killing:.2e})"
    elif X.order < 2:
        reason = "jet order too low for the second Lie derivative"
    if reason is None:
        h = lie_derivative(X, geo.g, "dd")
        lhs = float(Y @ lie_derivative(xi, h, "dd").value @ x)
        V = jeinsum("ai,i->a", covariant(geo, X, "u"), xi)
        W = jeinsum("ai,i->a", covariant(geo, V, "u"), xi).value
        s = jeinsum("ij,i,j->", geo.g, V, xi)
        common = float(Y @ ls.gv @ W + Y @ s.grad().value)
        Xv = X.value
        scale = 1.0 + max(abs(lhs), abs(common))
        out["L51"] = LemmaOutcome("L51", abs(lhs - float(Xv @ ls.gv @ Y) - common) / scale)
        out["L51Q"] = LemmaOutcome("L51Q", abs(lhs - float((ls.Q.value @ Xv) @ ls.gv @ Y) - common) / scale)
    else:
        out["L51"] = LemmaOutcome("L51", None, reason)
        out["L51Q"] = LemmaOutcome("L51Q", None, reason)

    # Lie derivative of df (x) df, valid for any f, xi, Y
    pots = _potentials(data)
    if pots is None:
        out["L52"] = LemmaOutcome("L52", None, "no potential given")
    else:
        f = pots[1](p, k)
        df = f.grad()
        lhs = float(Y @ lie_derivative(xi, jeinsum("i,j->ij", df, df), "dd").value @ x)
        xf = directional(xi, f)
        Yc = Jet.constant(Y, f.nvars, max(f.order - 1, 0))
        rhs = float((directional(Yc, xf) * xf + directional(Yc, f) * directional(xi, xf)).value)
        out["L52"] = LemmaOutcome("L52", abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs))))

    # nabla_xi grad f on a soliton
    if pots is None or params is None:
        out["L53"] = LemmaOutcome("L53", None, "no potential or soliton parameters given")
    else:
        sol = soliton_check(S, data, params, p)
        ricx = ric_xi_D(S, p)
        if sol > tol:
            out["L53"] = LemmaOutcome("L53", None, f"soliton equation not satisfied (residual {sol:.2e})")
        elif ricx > tol:
            out["L53"] = LemmaOutcome("L53", None, f"Ric(xi, D) does not vanish (residual {ricx:.2e})")
        else:
            f1, f2 = (fld(p, k) for fld in pots)
            g1 = gradient(geo, f1)
            g2 = gradient(geo, f2).value
            lhs = covariant(geo, g1, "u").value @ x
            a = soliton_constant(S, params, p)
            xf2 = float(f2.grad().value @ x)
            rhs = a * x - params.c1 * xf2 * g2
            d = lhs - rhs
            out["L53"] = LemmaOutcome(
                "L53", _gnorm(ls, d) / (1.0 + max(_gnorm(ls, lhs), _gnorm(ls, rhs)))
            )
    return out


def theorem51_diagnostic(
    S: WeakStructure,
    f: Field,
    params: SolitonParams,
    points=None,
    tol: float = DEFAULT_TOL,
) -> CheckReport:
    """Falsifiable check of the gradient-soliton rigidity statement.

    Hypotheses: weak K-contact, ``tr Qtilde`` constant, the soliton equation,
    ``Ric(xi, D) = 0`` and ``c1 (lam + 2 c2 n + c2 tr Qtilde) != -1``.  When
    all hold, asserts ``grad f = 0`` and, if ``c2 != 0``, that the metric is
    Einstein.  Otherwise the conclusions are skipped and the failing
    hypotheses are listed in ``meta['theorem51']['failed']``.
    """
    pts = sample_points(S.chart, SamplePlan(count=20)) if points is None else np.atleast_2d(points)
    data = Potential(f)
    locs = [S.local(p) for p in pts]
    level = classify(S, pts[: min(10, len(pts))], tol).level
    trqt = np.array([float(np.trace(ls.Qt.value)) for ls in locs])
    sol = max(soliton_check(S, data, params, p) for p in pts)
    ricx = max(ric_xi_D(S, p) for p in pts)
    a = params.lam + 2 * params.c2 * S.n + params.c2 * float(trqt.mean())
    nondeg = abs(params.c1 * a + 1.0)
    failed = []
    if level < LadderLevel.WeakKContact:
        failed.append("NotWeakKContact")
    if float(trqt.std()) > tol:
        failed.append("TrQtildeNotConstant")
    if sol > tol:
        failed.append("SolitonEquation")
    if ricx > tol:
        failed.append("RicXiD")
    if nondeg <= 1e-6:
        failed.append("NonDegeneracyViolated")
    rep = CheckReport()
    rep.meta["theorem51"] = {
        "applicable": not failed,
        "failed": failed,
        "level": level.label,
        "trQtilde_mean": float(trqt.mean()),
        "trQtilde_std": float(trqt.std()),
        "soliton_residual_max": sol,
        "ric_xi_D_max": ricx,
        "nondegeneracy": nondeg,
        "a": a,
    }
    names = ("theorem51.grad_f_vanishes", "theorem51.einstein")
    anchors = ("f = const", "Ric = (tau / (2n+1)) g when c2 != 0")
    if failed:
        for nm, an in zip(names, anchors):
            rep.add(skipped(nm, an, tol, "hypothesis failed: " + ", ".join(failed)))
        return rep
    grads = []
    for p, ls in zip(pts, locs):
        gf = gradient(ls.geo, f(p, ls.k)).value
        grads.append(_gnorm(ls, gf))
    rep.add(aggregate(names[0], anchors[0], grads, tol))
    if abs(params.c2) > 1e-12:
        res = []
        for ls in locs:
            ric = ls.geo.ricci.value
            tau = float(ls.geo.scalar.value)
            res.append(hybrid_residual(ls.fc_bil(ric), ls.fc_bil(tau / S.dim * ls.gv)))
        rep.add(aggregate(names[1], anchors[1], res, tol))
    else:
        rep.add(skipped(names[1], anchors[1], tol, "c2 = 0: no Einstein conclusion"))
    return rep


def quasi_einstein_residual(metric: Field, qe: QuasiEinsteinParams, p) -> np.ndarray:
    """``Ric - a g - b mu (x) mu`` in coordinates."""
    from .riemann import local_geometry

    p = np.asarray(p, dtype=float)
    geo = local_geometry(metric, p, 2)
    g = geo.g.value
    mu = qe.mu(p, 0).value
    nrm = float(mu @ np.linalg.solve(g, mu))
    if abs(nrm - 1.0) > 1e-8:
        raise InvalidConfig(f"mu must have unit norm, got |mu|^2 = {nrm:.6g}")
    return geo.ricci.value - qe.a * g - qe.b * np.outer(mu, mu)


def reduced_residual(S: WeakStructure, f2: Field, params: SolitonParams, p) -> np.ndarray:
    """``-c1 a Hess f2 - (-c1 df2 (x) df2 + c2 Ric + lam g)`` with ``a`` at ``p``."""
    p = np.asarray(p, dtype=float)
    ls, geo, k = _geo_k(S, p)
    f = f2(p, k)
    a = soliton_constant(S, params, p)
    df = f.grad().value
    rhs = -params.c1 * np.outer(df, df) + params.c2 * geo.ricci.value + params.lam * ls.gv
    return -params.c1 * a * hessian(geo, f).value - rhs


def random_potential(rng: np.random.Generator, dim: int, terms: int = 3) -> Field:
    """Random smooth function ``sum_j c_j sin(k_j . x + s_j)``."""
    c = rng.normal(size=terms)
    kk = rng.normal(size=(terms, dim))
    s = rng.uniform(0, 2 * np.pi, size=terms)

    def expr(x):
        total = 0.0
        for j in range(terms):
            arg = s[j]
            for i in range(dim):
                arg = arg + kk[j, i] * x[i]
            total = total + c[j] * jets.sin(arg)
        return total

    return Field.closed_form(expr, "scalar", "random")
