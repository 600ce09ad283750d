"""Jet-free finite-difference references for the connection and curvature.

Metric values come from :meth:`ChartManifold.metric_values` (closed form or
complex-step Jacobians); derivatives are central differences.  Nothing here
touches the jet code, so agreement is an independent check of it.
"""

from __future__ import annotations

import numpy as np

from .manifold import ChartManifold
from .report import CheckReport, aggregate
from .riemann import local_geometry

__all__ = ["fd_christoffel", "fd_riemann", "fd_ricci", "relative_error", "oracle_report", "STEP", "ORACLE_TOL"]

STEP = 1e-4
ORACLE_TOL = 1e-5
# central stencils: offsets and weights (divided by h)
STENCILS = {
    2: ((1, -1), (0.5, -0.5)),
    4: ((2, 1, -1, -2), (-1 / 12, 8 / 12, -8 / 12, 1 / 12)),
}


def _central(fn, p, axis, h, stencil):
    offs, wts = STENCILS[stencil]
    e = np.zeros_like(p)
    e[axis] = h
    return sum(w * fn(p + o * e) for o, w in zip(offs, wts)) / h


def _metric(chart: ChartManifold, p) -> np.ndarray:
    return np.real(chart.metric_values(np.asarray(p, dtype=float)))


def fd_christoffel(chart: ChartManifold, p, h: float = STEP, stencil: int = 4) -> np.ndarray:
    """``Gamma[k, i, j]`` from central differences of the metric."""
    p = np.asarray(p, dtype=float)
    m = p.size
    dg = np.empty((m, m, m))  # dg[i, j, l] = d_l g_ij
    for l in range(m):
        dg[:, :, l] = _central(lambda q: _metric(chart, q), p, l, h, stencil)
    ginv = np.linalg.inv(_metric(chart, p))
    # lowered[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    lowered = 0.5 * (
        np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    )
    return np.einsum("kl,lij->kij", ginv, lowered)


def fd_riemann(chart: ChartManifold, p, h: float = STEP, stencil: int = 4) -> np.ndarray:
    """``R[l, k, i, j]`` (component of ``R(d_i, d_j) d_k``) from differences of Gamma."""
    p = np.asarray(p, dtype=float)
    m = p.size
    G = fd_christoffel(chart, p, h, stencil)
    dG = np.empty((m, m, m, m))  # dG[k, i, j, a] = d_a Gamma^k_ij
    for a in range(m):
        dG[..., a] = _central(lambda q: fd_christoffel(chart, q, h, stencil), p, a, h, stencil)
    # R^l_{k i j} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + Gamma^l_{ia} Gamma^a_{jk} - Gamma^l_{ja} Gamma^a_{ik}
    R = (
        np.einsum("ljki->lkij", dG)
        - np.einsum("likj->lkij", dG)
        + np.einsum("lia,ajk->lkij", G, G)
        - np.einsum("lja,aik->lkij", G, G)
    )
    return R


def fd_ricci(chart: ChartManifold, p, h: float = STEP, stencil: int = 4) -> np.ndarray:
    return np.einsum("lklj->jk", fd_riemann(chart, p, h, stencil))


def relative_error(a, ref) -> float:
    """``max|a - ref| / max|ref|`` (absolute when ``ref`` vanishes)."""
    a = np.asarray(a, dtype=float)
    ref = np.asarray(ref, dtype=float)
    scale = float(np.max(np.abs(ref)))
    err = float(np.max(np.abs(a - ref)))
    return err / scale if scale > 1e-12 else err


def oracle_report(
    chart: ChartManifold, points, h: float = STEP, tol: float = ORACLE_TOL, metric=None, stencil: int = 4
) -> CheckReport:
    """Jet Gamma, R and Ric against the finite-difference references.

    The default five-point stencil keeps the truncation error of the nested
    difference well below ``tol`` even close to the chart margin.
    """
    metric = chart.metric if metric is None else metric
    rows = {"christoffel": [], "riemann": [], "ricci": []}
    for p in np.atleast_2d(points):
        geo = local_geometry(metric, p, 2)
        R_fd = fd_riemann(chart, p, h, stencil)
        rows["christoffel"].append(relative_error(geo.gamma.value, fd_christoffel(chart, p, h, stencil)))
        rows["riemann"].append(relative_error(geo.riemann.value, R_fd))
        rows["ricci"].append(relative_error(geo.ricci.value, np.einsum("lklj->jk", R_fd)))
    anchors = {
        "christoffel": "Gamma from central differences of g",
        "riemann": "R from central differences of Gamma",
        "ricci": "Ric by contraction of the difference curvature",
    }
    rep = CheckReport()
    for name, vals in rows.items():
        rep.add(aggregate(f"oracle.{name}", anchors[name], vals, tol))
    return rep
