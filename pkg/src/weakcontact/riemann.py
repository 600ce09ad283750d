"""Levi-Civita calculus on chart jets.

Curvature sign convention (used everywhere in this package)::

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z

stored as ``riemann[l, k, i, j]`` with ``R(d_i, d_j) d_k = riemann[l, k, i, j] d_l``.
With this convention the unit sphere has ``R(X, Y)Z = g(Y, Z)X - g(X, Z)Y``
and the Killing identity ``nabla_X nabla_Y xi - nabla_{nabla_X Y} xi = R(xi, X)Y``
holds.

Derivative indices are always appended last: ``(nabla T)[..., i] = nabla_i T``.
Exterior derivatives use the ``1/(k+1)`` normalisation, so for a 1-form
``d eta(X, Y) = 1/2 (X eta(Y) - Y eta(X) - eta([X, Y]))``.
"""

from __future__ import annotations

import functools
from typing import Sequence

import numpy as np

from . import jets
from .errors import DegeneratePlane, InternalInconsistency, JetOrderError
from .jets import Jet, jeinsum
from .manifold import Field, as_jet, full_frame, lie_bracket

__all__ = [
    "LocalGeometry",
    "local_geometry",
    "hybrid_residual",
    "christoffel",
    "riemann",
    "ricci_and_scalar",
    "sectional",
    "sectional_from",
    "covariant",
    "covariant_derivative",
    "lie_derivative",
    "lie_derivative_metric",
    "exterior_derivative",
    "exterior_derivative_fields",
    "gradient",
    "hessian",
    "nijenhuis",
    "nabla_ricci_contracted",
    "directional",
]


def hybrid_residual(lhs, rhs) -> float:
    """``max|lhs - rhs| / (1 + max(|lhs|, |rhs|))``; robust near zero."""
    lhs = np.asarray(jets.value_of(lhs))
    rhs = np.asarray(jets.value_of(rhs))
    diff = np.max(np.abs(lhs - rhs), initial=0.0)
    scale = max(np.max(np.abs(lhs), initial=0.0), np.max(np.abs(rhs), initial=0.0))
    return float(diff / (1.0 + scale))


class LocalGeometry:
    """Christoffel symbols, curvature and Ricci jets of a metric at a point."""

    def __init__(self, metric: Field, p, order: int = jets.MAX_ORDER):
        self.p = np.asarray(p, dtype=float)
        self.order = order
        self.g = metric(self.p, order)
        self.dim = self.g.shape[0]
        if self.g.order < order:
            raise JetOrderError(f"metric available only to order {self.g.order}")

    @functools.cached_property
    def ginv(self) -> Jet:
        return jets.inv(self.g)

    @functools.cached_property
    def gamma(self) -> Jet:
        """``gamma[k, i, j] = Gamma^k_{ij}``."""
        dg = self.g.grad()  # dg[a, b, c] = d_c g_ab
        lowered = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(0, 2, 1) - dg)  # [i, j, l]
        return jeinsum("kl,ijl->kij", self.ginv, lowered)

    @functools.cached_property
    def riemann(self) -> Jet:
        G = self.gamma
        dG = G.grad()  # dG[l, a, b, c] = d_c Gamma^l_ab
        t1 = dG.transpose(0, 2, 3, 1)  # [l, k, i, j] = d_i Gamma^l_{jk}
        t2 = dG.transpose(0, 2, 1, 3)  # [l, k, i, j] = d_j Gamma^l_{ik}
        q1 = jeinsum("lim,mjk->lkij", G, G)
        q2 = jeinsum("ljm,mik->lkij", G, G)
        return t1 - t2 + q1 - q2

    @functools.cached_property
    def ricci(self) -> Jet:
        """Index contraction ``Ric_jk = R^l_{k l j}``."""
        return jeinsum("lklj->jk", self.riemann)

    @functools.cached_property
    def scalar(self) -> Jet:
        return jeinsum("jk,jk->", self.ginv, self.ricci)

    # value-level helpers
    @property
    def gv(self) -> np.ndarray:
        return self.g.value

    def curvature(self, X, Y, Z) -> np.ndarray:
        """Value of ``R(X, Y)Z`` for plain vectors (batched on leading axes)."""
        return np.einsum("lkij,...k,...i,...j->...l", self.riemann.value, Z, X, Y)

    def ricci_frame(self) -> np.ndarray:
        """Ricci tensor by orthonormal-frame contraction ``sum_a g(R(e_a, Y)Z, e_a)``."""
        g = self.gv
        E = full_frame(g, np.eye(self.dim)[0])
        return np.einsum("lm,am,lkij,ai->jk", g, E, self.riemann.value, E)


def local_geometry(metric: Field, p, order: int = jets.MAX_ORDER) -> LocalGeometry:
    """Cached :class:`LocalGeometry` of ``metric`` at ``p``."""
    key = (tuple(np.asarray(p, dtype=float).tolist()), order)
    geo = metric._geo.get(key)
    if geo is None:
        if len(metric._geo) > 1024:
            metric._geo.clear()
        geo = LocalGeometry(metric, p, order)
        metric._geo[key] = geo
    return geo


# -- point-value entry points ---------------------------------------------

def christoffel(metric: Field, p) -> np.ndarray:
    return local_geometry(metric, p, 1).gamma.value


def riemann(metric: Field, p) -> np.ndarray:
    return local_geometry(metric, p, 2).riemann.value


def ricci_and_scalar(metric: Field, p, check: bool = False):
    """Ricci tensor (frame contraction) and scalar curvature at ``p``.

    With ``check=True`` the frame route is compared against the index
    contraction and :class:`InternalInconsistency` is raised on mismatch.
    """
    geo = local_geometry(metric, p, 2)
    ric = geo.ricci_frame()
    if check:
        r = hybrid_residual(ric, geo.ricci.value)
        if r > 1e-9:
            raise InternalInconsistency(f"Ricci routes disagree by {r:.3e}")
    tau = float(np.einsum("jk,jk->", np.linalg.inv(geo.gv), ric))
    return ric, tau


def sectional_from(geo: LocalGeometry, X, Y) -> float:
    g = geo.gv
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if den < 1e-14:
        raise DegeneratePlane("sectional curvature of a degenerate plane")
    num = geo.curvature(X, Y, Y) @ g @ X
    return float(num / den)


def sectional(metric: Field, p, X, Y) -> float:
    """``K = g(R(X,Y)Y, X) / (|X|^2 |Y|^2 - g(X,Y)^2)``."""
    return sectional_from(local_geometry(metric, p, 2), X, Y)


# -- jet-level operators --------------------------------------------------

_LETTERS = "abcdefgh"


def covariant(geo: LocalGeometry, T: Jet, pattern: str) -> Jet:
    """Covariant derivative of a tensor jet, derivative index appended last.

    ``pattern`` lists the index types of the trailing axes of ``T`` ('u' for
    contravariant, 'd' for covariant); leading axes are not allowed.
    """
    r = len(pattern)
    if T.ndim != r:
        raise ValueError(f"pattern {pattern!r} does not match tensor rank {T.ndim}")
    if isinstance(T, Jet) and T.order == 0:
        raise JetOrderError("jet order exhausted by differentiation")
    G = geo.gamma
    out = T.grad() if isinstance(T, Jet) else None
    idx = _LETTERS[:r]
    for pos, kind in enumerate(pattern):
        sub = idx[:pos] + "z" + idx[pos + 1 :]
        if kind == "u":
            term = jeinsum(f"{idx[pos]}iz,{sub}->{idx}i", G, T)
            out = out + term
        elif kind == "d":
            term = jeinsum(f"zi{idx[pos]},{sub}->{idx}i", G, T)
            out = out - term
        else:
            raise ValueError(f"bad index type {kind!r}")
    return out


def covariant_derivative(geo: LocalGeometry, T: Jet, pattern: str, X) -> Jet:
    """``nabla_X T`` for a direction ``X`` (vector jet or plain vector)."""
    return jeinsum("...i,i->...", covariant(geo, T, pattern), X)


def directional(X, f: Jet) -> Jet:
    """``X(f)`` for a scalar-valued jet ``f`` (batched along leading axes)."""
    return jeinsum("...i,...i->...", X, f.grad())


def lie_derivative(X: Jet, T: Jet, pattern: str) -> Jet:
    """Lie derivative of a tensor jet along the vector jet ``X``."""
    r = len(pattern)
    if T.ndim != r:
        raise ValueError(f"pattern {pattern!r} does not match tensor rank {T.ndim}")
    idx = _LETTERS[:r]
    out = jeinsum(f"z,{idx}z->{idx}", X, T.grad())
    dX = X.grad()  # dX[a, c] = d_c X^a
    for pos, kind in enumerate(pattern):
        sub = idx[:pos] + "z" + idx[pos + 1 :]
        if kind == "u":
            out = out - jeinsum(f"{sub},{idx[pos]}z->{idx}", T, dX)
        elif kind == "d":
            out = out + jeinsum(f"{sub},z{idx[pos]}->{idx}", T, dX)
        else:
            raise ValueError(f"bad index type {kind!r}")
    return out


def lie_derivative_metric(X: Jet, g: Jet) -> Jet:
    """``(L_X g)(Y, Z) = X g(Y,Z) - g([X,Y], Z) - g(Y, [X,Z])`` in components."""
    return lie_derivative(X, g, "dd")


def exterior_derivative(omega: Jet) -> Jet:
    """Components of ``d omega`` for a 1-form (``(m,)``) or 2-form (``(m, m)``)."""
    if omega.ndim == 1:
        G = omega.grad()  # G[a, b] = d_b omega_a
        return 0.5 * (G.T - G)
    if omega.ndim == 2:
        G = omega.grad()  # G[a, b, c] = d_c omega_ab
        return (G.transpose(2, 0, 1) + G.transpose(1, 2, 0) + G) * (1.0 / 3.0)
    raise ValueError("exterior derivative supported for 1- and 2-forms only")


def exterior_derivative_fields(omega: Jet, *fields: Jet) -> Jet:
    """Invariant formula for ``d omega`` evaluated on vector-field jets.

    The ``1/(k+1)`` factor multiplies both the derivative and the bracket
    sums, which keeps the expression tensorial.
    """
    k = omega.ndim
    if k not in (1, 2) or len(fields) != k + 1:
        raise ValueError("need a 1-form with two fields or a 2-form with three fields")

    def ev(*vs):
        if k == 1:
            return jeinsum("a,a->", omega, vs[0])
        return jeinsum("ab,a,b->", omega, vs[0], vs[1])

    total = None
    for i, Xi in enumerate(fields):
        rest = fields[:i] + fields[i + 1 :]
        term = directional(Xi, ev(*rest)) * ((-1) ** i)
        total = term if total is None else total + term
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            rest = [f for t, f in enumerate(fields) if t not in (i, j)]
            term = ev(lie_bracket(fields[i], fields[j]), *rest) * ((-1) ** (i + j))
            total = total + term
    return total * (1.0 / (k + 1))


def gradient(geo: LocalGeometry, f: Jet) -> Jet:
    """``grad f = g^{-1} df``."""
    return jeinsum("ij,j->i", geo.ginv, f.grad())


def hessian(geo: LocalGeometry, f: Jet, tol: float = 1e-6) -> Jet:
    """``nabla df`` cross-checked against ``1/2 L_{grad f} g``."""
    H = covariant(geo, f.grad(), "d")
    H2 = 0.5 * lie_derivative(gradient(geo, f), geo.g, "dd")
    r = hybrid_residual(H.value, H2.value)
    if r > tol:
        raise InternalInconsistency(f"Hessian routes disagree by {r:.3e}")
    return H


def nijenhuis(phi: Jet, X: Jet, Y: Jet) -> Jet:
    """``phi^2[X,Y] + [phiX, phiY] - phi[phiX, Y] - phi[X, phiY]``."""
    def ap(v):
        return jeinsum("ij,...j->...i", phi, v)

    pX, pY = ap(X), ap(Y)
    return (
        ap(ap(lie_bracket(X, Y)))
        + lie_bracket(pX, pY)
        - ap(lie_bracket(pX, Y))
        - ap(lie_bracket(X, pY))
    )


def nabla_ricci_contracted(geo: LocalGeometry, xi: Jet):
    """``(nabla_Y Ric)(xi, Z)`` as ``M[Y, Z]`` and ``(nabla_Y Ric)(xi, xi)`` as ``v[Y]``.

    Requires the geometry at jet order 3.
    """
    if geo.order < 3:
        raise JetOrderError("nabla Ric needs jet order 3")
    dric = covariant(geo, geo.ricci, "dd").value  # [a, b, i]
    x = jets.value_of(xi)
    M = np.einsum("a,abi->ib", x, dric)
    v = M @ x
    return M, v
