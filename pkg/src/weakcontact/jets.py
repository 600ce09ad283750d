"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients ``c[alpha] = d^alpha f / alpha!``
of one or more functions of ``nvars`` chart variables, truncated at total
degree ``order``.  Coefficients live on the last array axis, indexed by a
canonical enumeration of multi-indices sorted by total degree, so that the
coefficients of a lower order form a prefix of the higher-order layout.

Jets of array shape (vectors, matrices, ...) are first-class: ``Jet.shape``
is the shape of the tensor of functions, and :func:`jeinsum` contracts tensor
indices while multiplying in the coefficient space.

The module-level elementary functions (:func:`sin`, :func:`sqrt`, ...) also
accept plain floats, complex numbers and arrays, in which case they defer to
numpy.  This lets one closed-form chart expression serve both jet evaluation
and value-only oracles.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Sequence

import numpy as np

from .errors import JetDomainError, JetOrderError

__all__ = [
    "Jet",
    "seed_point",
    "partial",
    "jeinsum",
    "inv",
    "stack",
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "power",
    "value_of",
    "MAX_ORDER",
]

#: Highest order accepted by :func:`seed_point`.
MAX_ORDER = 3
# Embedding-induced metrics are seeded one order higher internally.
_INTERNAL_MAX_ORDER = MAX_ORDER + 1


class _Layout:
    """Multi-index bookkeeping for a fixed (nvars, order)."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        alphas = []
        for d in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), d):
                a = [0] * nvars
                for v in combo:
                    a[v] += 1
                alphas.append(tuple(a))
        self.alphas = alphas
        self.size = len(alphas)
        self.index = {a: i for i, a in enumerate(alphas)}
        self.degree = np.array([sum(a) for a in alphas])
        self.factorial = np.array(
            [math.prod(math.factorial(x) for x in a) for a in alphas], dtype=float
        )

        # product pairs grouped by the index of the sum
        pa, pb, pc = [], [], []
        for ia, a in enumerate(alphas):
            for ib, b in enumerate(alphas):
                s = tuple(x + y for x, y in zip(a, b))
                if sum(s) <= order:
                    pa.append(ia)
                    pb.append(ib)
                    pc.append(self.index[s])
        perm = np.argsort(pc, kind="stable")
        self.pair_a = np.asarray(pa)[perm]
        self.pair_b = np.asarray(pb)[perm]
        pc_sorted = np.asarray(pc)[perm]
        self.pair_starts = np.searchsorted(pc_sorted, np.arange(self.size))

        # d/dx_i maps order-k coefficients onto order-(k-1) coefficients
        if order > 0:
            lower = [a for a in alphas if sum(a) <= order - 1]
            src = np.empty((nvars, len(lower)), dtype=int)
            fac = np.empty((nvars, len(lower)))
            for i in range(nvars):
                for j, b in enumerate(lower):
                    up = list(b)
                    up[i] += 1
                    src[i, j] = self.index[tuple(up)]
                    fac[i, j] = up[i]
            self.deriv_src = src
            self.deriv_fac = fac

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = a[..., self.pair_a] * b[..., self.pair_b]
        return np.add.reduceat(prod, self.pair_starts, axis=-1)

    def multiply_outer(self, p: np.ndarray) -> np.ndarray:
        """Collapse an outer product ``p[..., A, B]`` onto product coefficients."""
        prod = p[..., self.pair_a, self.pair_b]
        return np.add.reduceat(prod, self.pair_starts, axis=-1)


@functools.lru_cache(maxsize=None)
def _layout(nvars: int, order: int) -> _Layout:
    return _Layout(nvars, order)


def _size(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


class Jet:
    """Tensor of truncated Taylor expansions in ``nvars`` variables."""

    __slots__ = ("coeffs", "nvars", "order")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, coeffs, nvars: int, order: int):
        coeffs = np.asarray(coeffs)
        if order < 0:
            raise JetOrderError("jet order exhausted by differentiation")
        if coeffs.shape[-1] != _size(nvars, order):
            raise ValueError(
                f"coefficient axis has length {coeffs.shape[-1]}, "
                f"expected {_size(nvars, order)} for nvars={nvars}, order={order}"
            )
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value)
        dtype = np.result_type(value.dtype, float)
        c = np.zeros(value.shape + (_size(nvars, order),), dtype=dtype)
        c[..., 0] = value
        return cls(c, nvars, order)

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.nvars, self.order)

    # -- array-like protocol -----------------------------------------
    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def value(self) -> np.ndarray:
        """Order-zero coefficients (the function values)."""
        return self.coeffs[..., 0]

    def __len__(self) -> int:
        return self.shape[0]

    def __getitem__(self, idx) -> "Jet":
        if idx is Ellipsis or (isinstance(idx, tuple) and Ellipsis in idx):
            raise IndexError("Ellipsis indexing is not supported on jets")
        if isinstance(idx, tuple) and len(idx) > self.ndim:
            raise IndexError("too many indices for jet")
        return Jet(self.coeffs[idx], self.nvars, self.order)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def transpose(self, *axes) -> "Jet":
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return Jet(self.coeffs.transpose(*axes, self.ndim), self.nvars, self.order)

    @property
    def T(self) -> "Jet":
        return self.transpose()

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.coeffs.reshape(shape + (self.coeffs.shape[-1],)), self.nvars, self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        elif isinstance(axis, int):
            axis = (axis % self.ndim,)
        else:
            axis = tuple(a % self.ndim for a in axis)
        return Jet(self.coeffs.sum(axis=axis), self.nvars, self.order)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[..., : _size(self.nvars, order)], self.nvars, order)

    def coefficient(self, alpha: Sequence[int]):
        """Raw Taylor coefficient for multi-index ``alpha`` (0 when absent)."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise ValueError("multi-index length must equal nvars")
        if sum(alpha) > self.order:
            return np.zeros(self.shape)
        return self.coeffs[..., _layout(self.nvars, self.order).index[alpha]]

    # -- differentiation ---------------------------------------------
    def d(self, i: int) -> "Jet":
        """Partial derivative along variable ``i`` (order drops by one)."""
        if self.order == 0:
            raise JetOrderError("jet order exhausted by differentiation")
        lay = _layout(self.nvars, self.order)
        return Jet(self.coeffs[..., lay.deriv_src[i]] * lay.deriv_fac[i], self.nvars, self.order - 1)

    def grad(self) -> "Jet":
        """All first partials, stacked on a new trailing shape axis."""
        if self.order == 0:
            raise JetOrderError("jet order exhausted by differentiation")
        lay = _layout(self.nvars, self.order)
        c = self.coeffs[..., lay.deriv_src] * lay.deriv_fac
        return Jet(c, self.nvars, self.order - 1)

    # -- arithmetic --------------------------------------------------
    def _binary_align(self, other: "Jet"):
        if other.nvars != self.nvars:
            raise ValueError("jets over different numbers of variables")
        k = min(self.order, other.order)
        a = self if self.order == k else self.truncate(k)
        b = other if other.order == k else other.truncate(k)
        return a, b, k

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            shape = np.broadcast_shapes(self.shape, other.shape) + (self.coeffs.shape[-1],)
            c = np.array(np.broadcast_to(self.coeffs, shape), dtype=np.result_type(self.coeffs, other))
            c[..., 0] += other
            return Jet(c, self.nvars, self.order)
        a, b, k = self._binary_align(other)
        return Jet(a.coeffs + b.coeffs, self.nvars, k)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.nvars, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other)[..., None], self.nvars, self.order)
        a, b, k = self._binary_align(other)
        return Jet(_layout(self.nvars, k).multiply(a.coeffs, b.coeffs), self.nvars, k)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            if np.any(other == 0):
                raise JetDomainError("division by zero")
            return Jet(self.coeffs / other[..., None], self.nvars, self.order)
        return self * power(other, -1)

    def __rtruediv__(self, other):
        return power(self, -1) * other

    def __pow__(self, p):
        return power(self, p)

    def __rpow__(self, base):
        return exp(self * np.log(base))

    def __matmul__(self, other):
        return jeinsum("...ij,...j->...i", self, other) if _ndim(other) == 1 else jeinsum(
            "...ij,...jk->...ik", self, other
        )

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, nvars={self.nvars}, order={self.order}, value={self.value!r})"


def _ndim(x) -> int:
    return x.ndim if isinstance(x, Jet) else np.ndim(x)


def value_of(x):
    """Function value of a jet, or ``x`` itself for plain numbers."""
    return x.value if isinstance(x, Jet) else x


# -- seeding and partials ------------------------------------------------

def _seed(coords, order: int) -> Jet:
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 1:
        raise ValueError("coords must be a 1-D vector")
    m = coords.shape[0]
    lay = _layout(m, order)
    c = np.zeros((m, lay.size))
    c[:, 0] = coords
    if order >= 1:
        c[np.arange(m), 1 + np.arange(m)] = 1.0
    return Jet(c, m, order)


def seed_point(coords, order: int) -> Jet:
    """Independent variables at ``coords`` as a vector of ``m`` jets.

    Component ``i`` has value ``coords[i]``, unit first partial in direction
    ``i`` and no other nonzero coefficient.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"jet order must be 1, 2 or 3, got {order}")
    return _seed(coords, order)


def partial(j: Jet, alpha: Sequence[int]):
    """The true partial derivative ``d^alpha f`` (``alpha! * coeff``)."""
    alpha = tuple(int(a) for a in alpha)
    if sum(alpha) > j.order:
        raise JetOrderError(f"|alpha|={sum(alpha)} exceeds jet order {j.order}")
    return math.prod(math.factorial(a) for a in alpha) * j.coefficient(alpha)


# -- contraction ---------------------------------------------------------

_FREE_LETTERS = "ZYXWVUTSRQPONMLKJIHGFEDCBA"


def _split_terms(spec: str):
    """Tokenise one einsum operand spec into letters and '...'."""
    out = []
    i = 0
    while i < len(spec):
        if spec.startswith("...", i):
            out.append("...")
            i += 3
        else:
            out.append(spec[i])
            i += 1
    return out


def _pair(sa: str, sb: str, so: str, a, b):
    used = set(sa + sb + so)
    c1, c2 = [x for x in _FREE_LETTERS if x not in used][:2]
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if not ja and not jb:
        return np.einsum(f"{sa},{sb}->{so}", a, b)
    if ja and not jb:
        return Jet(np.einsum(f"{sa}{c1},{sb}->{so}{c1}", a.coeffs, np.asarray(b)), a.nvars, a.order)
    if jb and not ja:
        return Jet(np.einsum(f"{sa},{sb}{c1}->{so}{c1}", np.asarray(a), b.coeffs), b.nvars, b.order)
    a, b, k = a._binary_align(b)
    outer = np.einsum(f"{sa}{c1},{sb}{c2}->{so}{c1}{c2}", a.coeffs, b.coeffs)
    return Jet(_layout(a.nvars, k).multiply_outer(outer), a.nvars, k)


def jeinsum(subscripts: str, *operands):
    """``numpy.einsum`` over jet tensors, multiplying in coefficient space.

    Operands may mix jets and plain arrays; the explicit ``->`` output form is
    required.  More than two operands are contracted left to right.
    """
    if "->" not in subscripts:
        raise ValueError("jeinsum requires an explicit output ('->')")
    lhs, out = subscripts.replace(" ", "").split("->")
    specs = lhs.split(",")
    if len(specs) != len(operands):
        raise ValueError("number of subscripts and operands differ")
    if len(operands) == 1:
        (a,) = operands
        if isinstance(a, Jet):
            c = [x for x in _FREE_LETTERS if x not in lhs + out][0]
            return Jet(np.einsum(f"{lhs}{c}->{out}{c}", a.coeffs), a.nvars, a.order)
        return np.einsum(subscripts, a)
    acc, acc_spec = operands[0], specs[0]
    for idx in range(1, len(operands)):
        rest = "".join(specs[idx + 1 :]) + out
        if idx == len(operands) - 1:
            inter = out
        else:
            letters = []
            for t in _split_terms(acc_spec) + _split_terms(specs[idx]):
                if t != "..." and t in rest and t not in letters:
                    letters.append(t)
            ell = "..." if "..." in acc_spec + specs[idx] else ""
            inter = ell + "".join(letters)
        acc = _pair(acc_spec, specs[idx], inter, acc, operands[idx])
        acc_spec = inter
    return acc


def stack(items, axis: int = 0, like: Jet | None = None) -> Jet:
    """Stack jets and/or plain numbers into one jet along a new axis."""
    items = list(items)
    ref = like
    for it in items:
        if isinstance(it, Jet):
            if ref is None or it.order < ref.order:
                ref = it
    if ref is None:
        raise ValueError("stack needs at least one jet or a 'like' reference")
    lifted = []
    for it in items:
        if isinstance(it, Jet):
            lifted.append(it if it.order == ref.order else it.truncate(ref.order))
        else:
            lifted.append(Jet.constant(it, ref.nvars, ref.order))
    shapes = np.broadcast_shapes(*[x.shape for x in lifted])
    cs = [np.broadcast_to(x.coeffs, shapes + (x.coeffs.shape[-1],)) for x in lifted]
    dtype = np.result_type(*cs)
    return Jet(np.stack(cs, axis=axis if axis >= 0 else axis - 1).astype(dtype, copy=False), ref.nvars, ref.order)


def inv(a: Jet) -> Jet:
    """Inverse of a jet-valued square matrix (last two shape axes)."""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    a0 = a.value
    try:
        a0inv = np.linalg.inv(a0)
    except np.linalg.LinAlgError as exc:
        raise JetDomainError("singular matrix in jet inverse") from exc
    h = a - a0
    # (a0 + h)^-1 = sum_n (-a0^-1 h)^n a0^-1, nilpotent beyond the order
    step = jeinsum("...ij,...jk->...ik", -a0inv, h)
    term = Jet.constant(a0inv, a.nvars, a.order)
    total = term
    for _ in range(a.order):
        term = jeinsum("...ij,...jk->...ik", step, term)
        total = total + term
    return total


# -- elementary functions ------------------------------------------------

def _compose(u: Jet, derivs) -> Jet:
    """f(u) from the derivatives f^(n)(u0), n = 0..order."""
    lay = _layout(u.nvars, u.order)
    h = u.coeffs.copy()
    h[..., 0] = 0
    dtype = np.result_type(u.coeffs, *[np.asarray(d) for d in derivs])
    out = np.zeros(u.coeffs.shape, dtype=dtype)
    out[..., 0] = derivs[0]
    power_ = h
    for n in range(1, u.order + 1):
        out += (np.asarray(derivs[n]) / math.factorial(n))[..., None] * power_
        if n < u.order:
            power_ = lay.multiply(power_, h)
    return Jet(out, u.nvars, u.order)


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    s, c = np.sin(x.value), np.cos(x.value)
    return _compose(x, [s, c, -s, -c, s][: x.order + 1])


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    s, c = np.sin(x.value), np.cos(x.value)
    return _compose(x, [c, -s, -c, s, c][: x.order + 1])


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    return _compose(x, [e] * (x.order + 1))


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    x0 = x.value
    if np.any(np.real(x0) <= 0):
        raise JetDomainError("log of a jet with nonpositive value part")
    derivs = [np.log(x0)] + [
        (-1) ** (n - 1) * math.factorial(n - 1) / x0**n for n in range(1, x.order + 1)
    ]
    return _compose(x, derivs)


def power(x, p):
    """``x ** p``; integer ``p >= 0`` uses exact repeated multiplication."""
    if isinstance(p, Jet):
        if not isinstance(x, Jet):
            return exp(p * np.log(x))
        return exp(p * log(x))
    if not isinstance(x, Jet):
        return np.power(x, p)
    if float(p).is_integer() and p >= 0:
        p = int(p)
        result = Jet.constant(np.ones(x.shape), x.nvars, x.order)
        base = x
        while p:
            if p & 1:
                result = result * base
            p >>= 1
            if p:
                base = base * base
        return result
    x0 = x.value
    if float(p).is_integer():
        if np.any(x0 == 0):
            raise JetDomainError("division by a jet with zero value part")
    elif np.any(np.real(x0) <= 0):
        raise JetDomainError("non-integer power of a jet with nonpositive value part")
    derivs = []
    falling = 1.0
    for n in range(x.order + 1):
        derivs.append(falling * x0 ** (p - n))
        falling *= p - n
    return _compose(x, derivs)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    if np.any(np.real(x.value) <= 0):
        raise JetDomainError("sqrt of a jet with nonpositive value part")
    return power(x, 0.5)
