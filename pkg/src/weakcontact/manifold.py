"""Coordinate charts, chart-coefficient fields, sampling and frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from . import jets
from .errors import DegenerateChart, DegenerateFrame, JetOrderError
from .jets import Jet

__all__ = [
    "Field",
    "ChartManifold",
    "SamplePlan",
    "sample_points",
    "induced_metric",
    "induced_metric_jet",
    "lie_bracket",
    "bracket",
    "orthonormal_frame_D",
    "full_frame",
    "as_jet",
]

KINDS = ("scalar", "vector", "covector", "tensor11", "bilinear")
_CACHE_LIMIT = 4096


def as_jet(x, like: Jet) -> Jet:
    """Lift constants to jets matching ``like`` (jets pass through)."""
    if isinstance(x, Jet):
        return x
    return Jet.constant(x, like.nvars, like.order)


def _normalize(out, x: Jet) -> Jet:
    if isinstance(out, Jet):
        return out
    if isinstance(out, (list, tuple)):
        return jets.stack([_normalize(o, x) for o in out], like=x)
    return Jet.constant(np.asarray(out, dtype=float), x.nvars, x.order)


class Field:
    """A tensor field given by its chart coefficients.

    ``fn(p, order)`` returns the Taylor expansion of the coefficients at the
    point ``p``.  Fields derived from the metric may return a lower order than
    requested when the metric jets are exhausted; consumers only rely on the
    orders they actually differentiate.

    Component conventions: vectors and covectors have shape ``(m,)``,
    (1,1)-tensors ``(m, m)`` with ``T[i, j]`` the ``i``-th component of
    ``T(d_j)``, bilinear forms ``(m, m)`` with ``B[i, j] = B(d_i, d_j)``.
    """

    def __init__(self, fn: Callable[[np.ndarray, int], Jet], kind: str, name: str = ""):
        if kind not in KINDS:
            raise ValueError(f"unknown field kind {kind!r}")
        self._fn = fn
        self.kind = kind
        self.name = name
        self._cache: dict = {}
        self._geo: dict = {}

    def __call__(self, p, order: int) -> Jet:
        key = (tuple(np.asarray(p, dtype=float).tolist()), order)
        hit = self._cache.get(key)
        if hit is None:
            if len(self._cache) > _CACHE_LIMIT:
                self._cache.clear()
            hit = self._fn(np.asarray(p, dtype=float), order)
            if hit.order > order:
                hit = hit.truncate(order)
            self._cache[key] = hit
        return hit

    def at(self, p) -> np.ndarray:
        """Plain component values at ``p``."""
        return self(p, 0).value

    @classmethod
    def closed_form(cls, expr: Callable, kind: str, name: str = "") -> "Field":
        """Field from an expression over the seeded coordinate jets.

        ``expr(x)`` receives a vector jet of coordinates and may return a jet,
        nested lists of jets/numbers, or constants.
        """

        def fn(p, order):
            x = jets._seed(p, order)
            return _normalize(expr(x), x)

        f = cls(fn, kind, name)
        f.expr = expr
        return f

    @classmethod
    def constant(cls, value, kind: str, name: str = "") -> "Field":
        value = np.asarray(value, dtype=float)

        def fn(p, order):
            return Jet.constant(value, len(p), order)

        f = cls(fn, kind, name)
        f.expr = lambda x: value
        return f

    def scaled(self, factor: float) -> "Field":
        return Field(lambda p, k: self(p, k) * factor, self.kind, self.name)

    def __repr__(self) -> str:
        return f"Field(kind={self.kind!r}, name={self.name!r})"


@dataclass(frozen=True)
class SamplePlan:
    count: int = 100
    seed: int = 0
    margin: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.margin < 0.5:
            raise ValueError("margin must lie in (0, 0.5)")
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def induced_metric_jet(embedding: Callable, p, order: int) -> Jet:
    """Pull-back metric ``J^T J`` of an embedding, expanded to ``order``."""
    if order + 1 > jets._INTERNAL_MAX_ORDER:
        raise JetOrderError(f"embedding metrics are available up to order {jets.MAX_ORDER}")
    x = jets._seed(p, order + 1)
    F = _normalize(embedding(x), x)
    J = F.grad()  # (N, m)
    sv = np.linalg.svd(J.value, compute_uv=False)
    if sv.size < J.shape[1] or sv[-1] <= 1e-10 * max(sv[0], 1.0):
        raise DegenerateChart(f"embedding Jacobian is rank deficient at {list(p)}")
    return jets.jeinsum("ai,aj->ij", J, J)


def induced_metric(embedding: Callable, p) -> np.ndarray:
    """Induced metric value ``g_ij = sum_A dF^A/dx^i dF^A/dx^j`` at ``p``."""
    return induced_metric_jet(embedding, np.asarray(p, dtype=float), 0).value


class ChartManifold:
    """An odd-dimensional coordinate chart carrying a Riemannian metric.

    Exactly one of ``metric`` (coordinates -> matrix) or ``embedding``
    (coordinates -> point of R^N) is given, both as expressions over jets.
    """

    def __init__(
        self,
        lower: Sequence[float],
        upper: Sequence[float],
        *,
        metric: Callable | None = None,
        embedding: Callable | None = None,
        labels: Sequence[str] | None = None,
        name: str = "",
    ):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if np.any(upper <= lower):
            raise ValueError("empty chart domain")
        m = lower.shape[0]
        if m < 3 or m % 2 == 0:
            raise ValueError(f"chart dimension must be odd and >= 3, got {m}")
        if (metric is None) == (embedding is None):
            raise ValueError("give exactly one of metric= or embedding=")
        self.dim = m
        self.lower = lower
        self.upper = upper
        self.labels = tuple(labels) if labels else tuple(f"x{i}" for i in range(m))
        self.name = name
        self.embedding = embedding
        self.metric_expr = metric
        if embedding is not None:
            self.metric = Field(
                lambda p, k: induced_metric_jet(embedding, p, k), "bilinear", "g"
            )
        else:
            self.metric = Field.closed_form(metric, "bilinear", "g")

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    def metric_values(self, x) -> np.ndarray:
        """Metric at plain (float or complex) coordinates, without jets.

        Embedding charts use complex-step Jacobians, so this is exact to
        rounding and shares no code with the jet path.
        """
        x = np.asarray(x)
        if self.embedding is None:
            return np.asarray(_plain(self.metric_expr(x)))
        h = 1e-30
        cols = []
        for i in range(self.dim):
            xc = x.astype(complex)
            xc[i] += 1j * h
            cols.append(np.imag(np.asarray(_plain(self.embedding(xc)))) / h)
        J = np.stack(cols, axis=1)
        return J.T @ J

    def check_metric(self, p) -> float:
        """Smallest eigenvalue of the metric at ``p``; raises if degenerate."""
        g = self.metric(p, 0).value
        if not np.allclose(g, g.T, atol=1e-12, rtol=0):
            raise DegenerateChart("metric is not symmetric")
        lam = np.linalg.eigvalsh(0.5 * (g + g.T))[0]
        if lam <= 1e-10:
            raise DegenerateChart(f"metric not positive definite at {list(p)}")
        return float(lam)

    def contains(self, p) -> bool:
        p = np.asarray(p)
        return bool(np.all(p > self.lower) and np.all(p < self.upper))

    def __repr__(self) -> str:
        return f"ChartManifold(name={self.name!r}, dim={self.dim})"


def _plain(out):
    if isinstance(out, (list, tuple)):
        return np.array([_plain(o) for o in out])
    return out


def sample_points(chart: ChartManifold, plan: SamplePlan) -> np.ndarray:
    """Deterministic Halton points inside the margin-shrunk chart box."""
    width = chart.upper - chart.lower
    lo = chart.lower + plan.margin * width
    hi = chart.upper - plan.margin * width
    if np.any(hi <= lo):
        raise ValueError("empty domain after margin shrink")
    engine = qmc.Halton(d=chart.dim, scramble=False)
    # index 0 of the sequence is the corner; start past it
    engine.fast_forward(1 + int(plan.seed))
    u = engine.random(plan.count)
    return lo + u * (hi - lo)


def lie_bracket(X: Jet, Y: Jet) -> Jet:
    """``[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k`` on vector jets (batched)."""
    return jets.jeinsum("...i,...ki->...k", X, Y.grad()) - jets.jeinsum(
        "...i,...ki->...k", Y, X.grad()
    )


def bracket(X: Field, Y: Field, p) -> np.ndarray:
    """Value of the Lie bracket of two vector fields at ``p``."""
    return lie_bracket(X(p, 1), Y(p, 1)).value


def orthonormal_frame_D(g: np.ndarray, xi: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """g-orthonormal basis of the g-orthogonal complement of ``xi``.

    Coordinate vectors are projected in index order and Gram-Schmidt
    orthonormalised; projections of norm below ``tol`` are skipped.  Returns
    an array of shape ``(m - 1, m)`` (one frame vector per row).
    """
    g = np.asarray(g, dtype=float)
    xi = np.asarray(xi, dtype=float)
    m = g.shape[0]
    gxx = xi @ g @ xi
    if gxx <= 0:
        raise DegenerateFrame("g(xi, xi) must be positive")
    frame: list[np.ndarray] = []
    for j in range(m):
        v = np.zeros(m)
        v[j] = 1.0
        v = v - (v @ g @ xi) / gxx * xi
        for e in frame:
            v = v - (v @ g @ e) * e
        nrm2 = v @ g @ v
        if nrm2 < tol**2:
            continue
        v = v / np.sqrt(nrm2)
        # one re-orthogonalisation pass for bit-stable orthonormality
        v = v - (v @ g @ xi) / gxx * xi
        for e in frame:
            v = v - (v @ g @ e) * e
        frame.append(v / np.sqrt(v @ g @ v))
        if len(frame) == m - 1:
            break
    if len(frame) < m - 1:
        raise DegenerateFrame(f"only {len(frame)} independent vectors orthogonal to xi")
    return np.array(frame)


def full_frame(g: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """``xi / |xi|`` followed by :func:`orthonormal_frame_D`, as rows."""
    xi = np.asarray(xi, dtype=float)
    unit = xi / np.sqrt(xi @ g @ xi)
    return np.vstack([unit, orthonormal_frame_D(g, xi)])
