"""The transformation group acting on log-rate vectors.

An element ``g = (sign, perm, shift)`` acts on ``x in R^n`` by

    g(x)_i = sign * x[perm[i]] + shift

which combines a coordinate permutation, the reflection ``x -> -x`` and a
translation along the diagonal. Permutations are 0-based here. The sign is
the character ``epsilon(g)``; the axioms say precisely that the log-residual
``h`` of an aggregator transforms as ``h(g x) = epsilon(g) h(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggregators import Aggregator
from .errors import ArityError, ValidationError

__all__ = [
    "GroupElement",
    "identity",
    "reflection",
    "translation",
    "permutation",
    "random_element",
    "apply",
    "compose",
    "character",
    "inverse",
    "to_matrix",
    "residual_h",
    "check_equivariance",
    "EquivarianceResult",
    "orbit_is_free",
]


@dataclass(frozen=True)
class GroupElement:
    sign: int
    perm: tuple[int, ...]
    shift: float = 0.0

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValidationError(f"sign must be +1 or -1, got {self.sign!r}")
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValidationError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        if not math.isfinite(self.shift):
            raise ValidationError("shift must be finite")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, x):
        return apply(self, x)

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return compose(self, other)


def identity(n: int) -> GroupElement:
    return GroupElement(1, tuple(range(n)), 0.0)


def reflection(n: int) -> GroupElement:
    return GroupElement(-1, tuple(range(n)), 0.0)


def translation(n: int, shift: float) -> GroupElement:
    return GroupElement(1, tuple(range(n)), shift)


def permutation(perm: Sequence[int]) -> GroupElement:
    return GroupElement(1, tuple(perm), 0.0)


def random_element(n: int, rng: np.random.Generator, shift_scale: float = 10.0) -> GroupElement:
    return GroupElement(
        int(rng.choice((-1, 1))),
        tuple(rng.permutation(n).tolist()),
        float(rng.uniform(-shift_scale, shift_scale)),
    )


def _check_same(n1: int, n2: int) -> None:
    if n1 != n2:
        raise ArityError(f"arity mismatch: {n1} vs {n2}")


def apply(g: GroupElement, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    _check_same(g.n, x.shape[-1])
    return g.sign * x[..., list(g.perm)] + g.shift


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """The element acting as ``g1`` after ``g2``."""
    _check_same(g1.n, g2.n)
    perm = tuple(g2.perm[j] for j in g1.perm)
    return GroupElement(g1.sign * g2.sign, perm, g1.sign * g2.shift + g1.shift)


def inverse(g: GroupElement) -> GroupElement:
    inv = [0] * g.n
    for i, j in enumerate(g.perm):
        inv[j] = i
    return GroupElement(g.sign, tuple(inv), -g.sign * g.shift)


def character(g: GroupElement) -> int:
    return g.sign


def to_matrix(g: GroupElement) -> np.ndarray:
    """Homogeneous ``(n+1) x (n+1)`` matrix ``[[sign * P, shift * 1], [0, 1]]``."""
    n = g.n
    M = np.zeros((n + 1, n + 1))
    M[np.arange(n), list(g.perm)] = g.sign
    M[:n, n] = g.shift
    M[n, n] = 1.0
    return M


def residual_h(agg: Aggregator, x) -> float:
    """``log agg(exp x) - mean(x)``: zero everywhere for the geometric mean."""
    x = np.asarray(x, dtype=np.float64)
    return math.log(agg(np.exp(x))) - float(x.mean())


@dataclass(frozen=True)
class EquivarianceResult:
    passed: bool
    deviation: float
    h_before: float
    h_after: float


def check_equivariance(agg: Aggregator, g: GroupElement, x, tol: float = 1e-9) -> EquivarianceResult:
    """Compare ``h(g x)`` with ``epsilon(g) h(x)``; absolute deviation in log units."""
    x = np.asarray(x, dtype=np.float64)
    h0 = residual_h(agg, x)
    h1 = residual_h(agg, apply(g, x))
    dev = abs(h1 - character(g) * h0)
    return EquivarianceResult(bool(dev <= tol), dev, h0, h1)


def orbit_is_free(x, elements: Sequence[GroupElement], decimals: int = 9) -> bool:
    """True if the sampled distinct elements send ``x`` to pairwise distinct points.

    A demonstration that, for ``n >= 3`` and a generic point, different group
    elements move it to different places. Not a proof of anything.
    """
    seen: set[tuple] = set()
    keys: set[tuple] = set()
    for g in elements:
        key = (g.sign, g.perm, round(g.shift, decimals))
        if key in keys:
            continue
        keys.add(key)
        pt = tuple(np.round(apply(g, x), decimals).tolist())
        if pt in seen:
            return False
        seen.add(pt)
    return True
