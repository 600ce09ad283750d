"""Concrete manifolds with closed-form charts and unit Killing fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .contact import LadderLevel
from .errors import UnknownManifold
from .manifold import ChartManifold, Field

__all__ = ["GalleryEntry", "ellipsoid", "round_sphere", "flat_torus", "REGISTRY", "get", "parse_params"]


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    chart: ChartManifold
    xi: Field
    params: dict = field(default_factory=dict)
    expected_level: LadderLevel | None = None
    expected_classical: bool | None = None
    expected_normal: bool | None = None
    expected_error: str | None = None
    description: str = ""


def _sc(x):
    """sin/cos for both jets and plain (possibly complex) arrays."""
    return jets.sin(x), jets.cos(x)


def ellipsoid(a: float = 2.0, n: int = 1) -> GalleryEntry:
    """The 3-dimensional ellipsoid ``u1^2 + u2^2 + a (u3^2 + u4^2) = 1`` in R^4.

    Chart ``(rho, t1, t2)`` with
    ``F = (cos rho cos t1, cos rho sin t1, sin rho cos t2 / sqrt a, sin rho sin t2 / sqrt a)``.
    The ambient field ``(-u2, u1, -sqrt(a) u4, sqrt(a) u3)`` pushes forward to the
    constant chart field ``d_t1 + sqrt(a) d_t2``.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f"ellipsoid parameter a must be positive, got {a}")
    if n != 1:
        raise NotImplementedError("only n = 1 (dimension 3) is implemented")
    ra = np.sqrt(a)

    def embedding(x):
        sr, cr = _sc(x[0])
        s1, c1 = _sc(x[1])
        s2, c2 = _sc(x[2])
        return [cr * c1, cr * s1, sr * c2 / ra, sr * s2 / ra]

    chart = ChartManifold(
        [0.0, -np.pi, -np.pi],
        [np.pi / 2, np.pi, np.pi],
        embedding=embedding,
        labels=("rho", "t1", "t2"),
        name="round_sphere" if a == 1.0 else "ellipsoid",
    )
    xi = Field.constant([0.0, 1.0, ra], "vector", "xi")
    return GalleryEntry(
        "ellipsoid" if a != 1.0 else "round_sphere",
        chart,
        xi,
        {"a": a, "n": n},
        expected_level=LadderLevel.WeakKContact,
        expected_classical=(a == 1.0),
        expected_normal=(a == 1.0),
        description="unit 3-sphere with its Hopf field" if a == 1.0 else "ellipsoid in R^4 with its unit Killing field",
    )


def round_sphere(n: int = 1) -> GalleryEntry:
    """Unit sphere S^3 with its Hopf field (the ellipsoid with a = 1)."""
    return ellipsoid(1.0, n)


def flat_torus(size: float = 2 * np.pi) -> GalleryEntry:
    """Euclidean box chart with the parallel unit field ``d_z``."""
    chart = ChartManifold(
        [0.0, 0.0, 0.0],
        [size, size, size],
        metric=lambda x: np.eye(3),
        labels=("x", "y", "z"),
        name="flat_torus",
    )
    xi = Field.constant([0.0, 0.0, 1.0], "vector", "xi")
    return GalleryEntry(
        "flat_torus",
        chart,
        xi,
        {"size": size},
        expected_level=LadderLevel.NotWeakAlmostContact,
        expected_error="DegenerateQ",
        description="flat 3-torus with a parallel field (degenerate counterexample)",
    )


REGISTRY: dict[str, Callable[..., GalleryEntry]] = {
    "ellipsoid": ellipsoid,
    "round_sphere": round_sphere,
    "flat_torus": flat_torus,
}

_PARAM_TYPES = {"a": float, "n": int, "size": float}


def parse_params(pairs) -> dict:
    """``["a=2", "n=1"]`` -> ``{"a": 2.0, "n": 1}``."""
    out = {}
    for item in pairs or ():
        if isinstance(item, str):
            if "=" not in item:
                raise ValueError(f"parameter {item!r} is not of the form key=value")
            k, v = item.split("=", 1)
        else:
            k, v = item
        k = k.strip()
        out[k] = _PARAM_TYPES.get(k, float)(v)
    return out


def get(name: str, params: dict | None = None) -> GalleryEntry:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise UnknownManifold(f"unknown manifold {name!r}; known: {', '.join(sorted(REGISTRY))}") from None
    try:
        return factory(**(params or {}))
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from None
