"""Aggregators: maps from a list of possible future rates to one forward rate.

Everything is evaluated in the log domain. Built-in aggregators carry a
vectorised ``batch`` path backed by the kernel module (compiled when
available), so the audit engine can evaluate thousands of scenarios per call.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._backend import kernels
from .errors import ArityError, DomainError, ExpansionTooLarge, ProbabilityError, ValidationError
from .reciprocity import ReciprocityFunction
from .scenario import RateScenario, as_rates, check_rate

__all__ = [
    "Aggregator",
    "OrderedRatios",
    "GEOMETRIC",
    "ARITHMETIC",
    "HARMONIC",
    "MEDIAN",
    "BUILTINS",
    "order_statistics",
    "consecutive_ratios",
    "geometric_mean",
    "arithmetic_mean",
    "harmonic_mean",
    "median_aggregate",
    "beta_aggregate",
    "beta_aggregator",
    "extract_beta",
    "mix",
    "weighted_geometric_mean",
    "weighted_geometric_mean_real",
    "expand_rational_probabilities",
    "implied_probability",
    "siegel_gap",
    "DEFAULT_EXPANSION_CAP",
]

DEFAULT_EXPANSION_CAP = 10**6

Rates = RateScenario | Sequence[float] | np.ndarray


@dataclass(frozen=True, eq=False)
class Aggregator:
    """A named aggregator.

    Parameters
    ----------
    name : str
        Identifier used in reports and on the command line.
    func : callable
        Scalar evaluation on a 1-D float64 array of rates.
    arity : int, optional
        Fixed number of rates, or None when any ``n >= 1`` is accepted.
    batch : callable, optional
        Vectorised evaluation on an ``(m, n)`` array, one result per row.
        When absent, :meth:`evaluate_many` loops over ``func``.
    """

    name: str
    func: Callable[[np.ndarray], float]
    arity: int | None = None
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def accepts(self, n: int) -> bool:
        return self.arity is None or self.arity == n

    def _check_arity(self, n: int) -> None:
        if not self.accepts(n):
            raise ArityError(f"{self.name} takes {self.arity} rates, got {n}")

    def __call__(self, s: Rates) -> float:
        x = as_rates(s)
        self._check_arity(x.size)
        return float(self.func(x))

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on every row of ``X`` (rows are assumed valid rate vectors)."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        self._check_arity(X.shape[1])
        if self.batch is not None:
            return np.asarray(self.batch(X), dtype=np.float64)
        return np.array([float(self.func(row)) for row in X], dtype=np.float64)

    def __repr__(self) -> str:
        return f"Aggregator({self.name!r}, arity={self.arity})"


def _from_kernel(name: str, kernel: Callable, arity: int | None = None) -> Aggregator:
    def scalar(x: np.ndarray) -> float:
        return float(kernel(np.ascontiguousarray(x, dtype=np.float64).reshape(1, -1))[0])

    scalar.__name__ = name
    return Aggregator(name, scalar, arity, kernel)


GEOMETRIC = _from_kernel("geometric", kernels.geometric_rows)
ARITHMETIC = _from_kernel("arithmetic", kernels.arithmetic_rows)
HARMONIC = _from_kernel("harmonic", kernels.harmonic_rows)
MEDIAN = _from_kernel("median", kernels.median_rows)

BUILTINS: dict[str, Aggregator] = {a.name: a for a in (GEOMETRIC, ARITHMETIC, HARMONIC, MEDIAN)}


@dataclass(frozen=True)
class OrderedRatios:
    """Consecutive order-statistic ratios, largest pair first: e(n)/e(n-1), ..., e(2)/e(1)."""

    ratios: tuple[float, ...]

    def __post_init__(self) -> None:
        r = tuple(float(u) for u in self.ratios)
        for i, u in enumerate(r):
            if not (math.isfinite(u) and u >= 1.0):
                raise DomainError(f"ratios[{i}] = {u!r}: ordered ratios must be finite and >= 1")
        object.__setattr__(self, "ratios", r)

    def __len__(self) -> int:
        return len(self.ratios)

    def __iter__(self):
        return iter(self.ratios)

    def __getitem__(self, i):
        return self.ratios[i]


def order_statistics(s: Rates) -> list[float]:
    """Rates in ascending order (stable, duplicates kept)."""
    x = as_rates(s, allow_weighted=True)
    return kernels.sorted_rows(x.reshape(1, -1))[0].tolist()


def consecutive_ratios(s: Rates) -> OrderedRatios:
    x = as_rates(s, allow_weighted=True)
    if x.size < 2:
        raise ArityError("consecutive ratios need at least two rates")
    return OrderedRatios(tuple(kernels.ratio_rows(x.reshape(1, -1))[0].tolist()))


def geometric_mean(s: Rates) -> float:
    return GEOMETRIC(s)


def arithmetic_mean(s: Rates) -> float:
    return ARITHMETIC(s)


def harmonic_mean(s: Rates) -> float:
    """Reciprocal of the arithmetic mean of reciprocals."""
    return HARMONIC(s)


def median_aggregate(s: Rates) -> float:
    """Middle order statistic; for even ``n`` the geometric mean of the two middle ones.

    The geometric (not arithmetic) midpoint is what makes the even-``n``
    median commute with taking reciprocals.
    """
    return MEDIAN(s)


def _beta_batch(beta: ReciprocityFunction) -> Callable[[np.ndarray], np.ndarray]:
    if beta.is_power_law:
        a = beta.float_exponents

        def batch(X: np.ndarray) -> np.ndarray:
            return kernels.power_beta_rows(X, a)

    else:

        def batch(X: np.ndarray) -> np.ndarray:
            gm = kernels.geometric_rows(X)
            U = kernels.ratio_rows(X)
            return gm * np.array([beta(u) for u in U])

    return batch


def beta_aggregator(beta: ReciprocityFunction) -> Aggregator:
    """The aggregator ``GM(e) * beta(consecutive_ratios(e))`` for ``n = beta.arity + 1`` rates."""
    return _from_kernel(f"beta[{beta.name}]", _beta_batch(beta), arity=beta.arity + 1)


def beta_aggregate(beta: ReciprocityFunction, s: Rates) -> float:
    x = as_rates(s)
    if x.size != beta.arity + 1:
        raise ArityError(f"{beta.name} needs {beta.arity + 1} rates, got {x.size}")
    return beta_aggregator(beta)(x)


def extract_beta(agg: Aggregator | Callable, u: OrderedRatios | Sequence[float]) -> float:
    """Recover the reciprocity function of ``agg`` at the ratio vector ``u``.

    Builds the ascending log-rate point whose consecutive ratios (largest
    first) are exactly ``u``: with ``v = reversed(u)`` this is
    ``x = (0, log v1, log v1 v2, ...)``. The residual
    ``h(x) = log agg(exp x) - mean(x)`` then gives ``beta(u) = exp(h(x))``.
    """
    if not isinstance(u, OrderedRatios):
        u = OrderedRatios(tuple(u))
    n = len(u) + 1
    if isinstance(agg, Aggregator) and not agg.accepts(n):
        raise ArityError(f"{agg.name} takes {agg.arity} rates but {len(u)} ratios imply n = {n}")
    if len(u) == 0:
        raise ArityError("need at least one ratio")
    v = np.log(np.asarray(u.ratios)[::-1])
    x = np.concatenate(([0.0], np.cumsum(v)))
    val = float(agg(np.exp(x)))
    check_rate(val, "aggregator output")
    return math.exp(math.log(val) - float(x.mean()))


def mix(a0: Aggregator, a1: Aggregator, alpha: float) -> Aggregator:
    """Log-linear blend ``a0 ** (1 - alpha) * a1 ** alpha``."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    if a0.arity is not None and a1.arity is not None and a0.arity != a1.arity:
        raise ArityError(f"cannot mix arities {a0.arity} and {a1.arity}")
    arity = a0.arity if a0.arity is not None else a1.arity
    w0, w1 = 1.0 - alpha, alpha

    def func(x: np.ndarray) -> float:
        return math.exp(w0 * math.log(a0.func(x)) + w1 * math.log(a1.func(x)))

    batch = None
    if a0.batch is not None and a1.batch is not None:

        def batch(X: np.ndarray) -> np.ndarray:
            return np.exp(w0 * np.log(a0.batch(X)) + w1 * np.log(a1.batch(X)))

    return Aggregator(f"mix({a0.name},{a1.name},{alpha!r})", func, arity, batch)


def _require_probabilities(s: RateScenario) -> tuple[Fraction, ...]:
    if not isinstance(s, RateScenario) or s.probabilities is None:
        raise ProbabilityError("a scenario with exact probabilities is required")
    return s.probabilities


def weighted_geometric_mean(s: RateScenario) -> float:
    """``prod(e_i ** p_i)`` for exact rational probabilities ``p_i``.

    The weighted log-sum is carried out in 40-digit decimal arithmetic, so the
    result is the correctly rounded double in all but pathological cases.
    """
    probs = _require_probabilities(s)
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        total = sum(
            (decimal.Decimal(p.numerator) / p.denominator * decimal.Decimal(r).ln()
             for r, p in zip(s.rates, probs)),
            decimal.Decimal(0),
        )
        return float(total.exp())


def weighted_geometric_mean_real(rates: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted geometric mean for arbitrary real weights.

    Convenience only: the axiomatic justification covers rational
    probabilities (see :func:`expand_rational_probabilities`), not irrational
    ones. Weights must be positive and sum to 1 within 1e-12.
    """
    x = as_rates(rates)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size != x.size:
        raise ProbabilityError(f"{w.size} weights for {x.size} rates")
    if not np.all(np.isfinite(w)) or np.any(w <= 0) or abs(math.fsum(w) - 1.0) > 1e-12:
        raise ProbabilityError("weights must be positive and sum to 1")
    return math.exp(kernels.weighted_log_mean(np.ascontiguousarray(x), np.ascontiguousarray(w)))


def expand_rational_probabilities(s: RateScenario, cap: int = DEFAULT_EXPANSION_CAP) -> RateScenario:
    """Rewrite a rationally weighted scenario as ``M`` equally likely states.

    ``M`` is the least common denominator of the probabilities and rate
    ``e_i`` is repeated ``p_i * M`` times, in input order.
    """
    probs = _require_probabilities(s)
    M = math.lcm(*(p.denominator for p in probs))
    if M > cap:
        raise ExpansionTooLarge(M, cap)
    rates: list[float] = []
    for r, p in zip(s.rates, probs):
        rates.extend([r] * (p.numerator * (M // p.denominator)))
    return RateScenario(tuple(rates), None, s.metadata)


def implied_probability(e1: float, e2: float) -> float:
    """Weight ``p`` on the first state such that ``sqrt(e1 e2) = p e1 + (1 - p) e2``.

    ``p = sqrt(e2) / (sqrt(e1) + sqrt(e2))``; at ``e1 == e2`` every ``p``
    solves the equation and 1/2 is returned. The state with the smaller rate
    always gets the larger weight. The smaller of ``p`` and ``1 - p`` is
    always formed directly, so it keeps full relative precision.
    """
    e1 = check_rate(e1, "e1")
    e2 = check_rate(e2, "e2")
    if e1 == e2:
        return 0.5
    r1, r2 = math.sqrt(e1), math.sqrt(e2)
    if e1 < e2:
        return 1.0 - r1 / (r1 + r2)
    return r2 / (r1 + r2)


def siegel_gap(agg: Aggregator, s: Rates) -> float:
    """Round-trip profit ``agg(s) * agg(1/s) - 1`` of pricing both directions with ``agg``.

    Zero for any aggregator satisfying the reciprocity axiom; for the
    arithmetic mean on (1, 4) it is 0.5625.
    """
    x = as_rates(s)
    return agg(x) * agg(1.0 / x) - 1.0
