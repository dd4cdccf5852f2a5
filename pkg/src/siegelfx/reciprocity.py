"""Reciprocity functions: positive beta with beta(u) * beta(reversed u) == 1."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ArityError, ReciprocityViolation

__all__ = ["ReciprocityFunction", "power_law_beta", "antisymmetry_defects"]


def _exact(a) -> Fraction:
    if isinstance(a, float) and not math.isfinite(a):
        raise ReciprocityViolation(f"exponent {a!r} is not finite")
    try:
        return Fraction(a)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ReciprocityViolation(f"exponent {a!r} is not a real number") from exc


def antisymmetry_defects(exponents: Sequence[Fraction]) -> list[tuple[int, int, Fraction]]:
    """Index pairs (1-based) where ``a_i + a_{m+1-i}`` is not exactly zero."""
    m = len(exponents)
    out = []
    for i in range((m + 1) // 2):
        s = exponents[i] + exponents[m - 1 - i]
        if s != 0:
            out.append((i + 1, m - i, s))
    return out


class ReciprocityFunction:
    """A function on ordered ratio vectors ``u in [1, inf)^(n-1)``.

    Two representations exist. The power-law family
    ``beta(u) = prod(u_k ** a_k)`` is validated exactly at construction: it is
    a reciprocity function precisely when the exponent vector is
    antisymmetric under reversal. A custom callable is validated by sampling.
    Use :meth:`power_law` or :meth:`custom` rather than the constructor.
    """

    def __init__(
        self,
        arity: int,
        *,
        exponents: Sequence[Fraction] | None = None,
        func: Callable[[np.ndarray], float] | None = None,
        name: str | None = None,
    ):
        if arity < 1:
            raise ArityError("a reciprocity function takes at least one ratio")
        if (exponents is None) == (func is None):
            raise TypeError("give exactly one of exponents= or func=")
        self.arity = int(arity)
        self.exponents = None if exponents is None else tuple(exponents)
        self._func = func
        if self.exponents is not None:
            self._a = np.array([float(a) for a in self.exponents], dtype=np.float64)
        self.name = name or (
            f"power_law({', '.join(str(a) for a in self.exponents)})"
            if self.exponents is not None
            else getattr(func, "__name__", "custom")
        )

    @classmethod
    def power_law(cls, exponents: Sequence, *, validate: bool = True) -> ReciprocityFunction:
        exps = tuple(_exact(a) for a in exponents)
        if not exps:
            raise ArityError("power_law needs at least one exponent")
        if validate:
            bad = antisymmetry_defects(exps)
            if bad:
                i, j, s = bad[0]
                raise ReciprocityViolation(
                    f"exponents are not antisymmetric: a_{i} + a_{j} = {s} != 0"
                )
        return cls(len(exps), exponents=exps)

    @classmethod
    def custom(
        cls,
        func: Callable[[np.ndarray], float],
        arity: int,
        *,
        validate: bool = True,
        samples: int = 256,
        seed: int = 0,
        tolerance: float = 1e-9,
        name: str | None = None,
    ) -> ReciprocityFunction:
        """Wrap an opaque callable; its identity is checked by random sampling only."""
        beta = cls(arity, func=func, name=name)
        if validate:
            rng = np.random.default_rng(seed)
            U = np.exp(rng.uniform(0.0, 4.0 * math.log(10.0), size=(samples, arity)))
            for u in U:
                dev = abs(beta(u) * beta(u[::-1]) - 1.0)
                if not dev <= tolerance:
                    raise ReciprocityViolation(
                        f"beta(u) * beta(reversed u) - 1 = {dev:.3g} at u = {u.tolist()}"
                    )
        return beta

    @property
    def is_power_law(self) -> bool:
        return self.exponents is not None

    @property
    def float_exponents(self) -> np.ndarray:
        if self.exponents is None:
            raise TypeError("custom reciprocity functions have no exponents")
        return self._a.copy()

    def __call__(self, *u) -> float:
        if len(u) == 1 and np.ndim(u[0]) == 1:
            u = u[0]
        v = np.asarray(u, dtype=np.float64).reshape(-1)
        if v.size != self.arity:
            raise ArityError(f"{self.name} takes {self.arity} ratios, got {v.size}")
        if self._func is not None:
            return float(self._func(v))
        return math.exp(float(np.dot(self._a, np.log(v))))

    def __repr__(self) -> str:
        return f"ReciprocityFunction({self.name}, arity={self.arity})"


def power_law_beta(exponents: Sequence) -> ReciprocityFunction:
    """``beta(u) = prod(u_k ** a_k)``; raises ReciprocityViolation unless ``a`` is antisymmetric.

    >>> power_law_beta([Fraction(-1, 3), Fraction(1, 3)])(4, 2)  # doctest: +ELLIPSIS
    0.7937...
    """
    return ReciprocityFunction.power_law(exponents)
