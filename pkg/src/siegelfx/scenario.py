"""Rate scenarios: finite lists of positive future exchange rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ProbabilityError, ValidationError

__all__ = ["RateScenario", "as_rates", "check_rate"]


def check_rate(value: float, where: str = "rate") -> float:
    """Return ``value`` as a float, raising ValidationError unless it is finite and > 0."""
    try:
        x = float(value)
    except (TypeError, ValueError, OverflowError) as exc:
        raise ValidationError(f"{where}: not a number ({value!r})") from exc
    if not math.isfinite(x):
        raise ValidationError(f"{where}: rate must be finite, got {x!r}")
    if x <= 0.0:
        raise ValidationError(f"{where}: rate must be strictly positive, got {x!r}")
    return x


def _check_probabilities(probs: Iterable[Any], n: int) -> tuple[Fraction, ...]:
    out = []
    for i, p in enumerate(probs):
        if isinstance(p, float):
            raise ProbabilityError(f"probabilities[{i}]: floats are not exact, pass a Fraction or 'num/den'")
        try:
            q = Fraction(p)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ProbabilityError(f"probabilities[{i}]: not a rational number ({p!r})") from exc
        if not 0 < q <= 1:
            raise ProbabilityError(f"probabilities[{i}]: {q} is outside (0, 1]")
        out.append(q)
    if len(out) != n:
        raise ProbabilityError(f"{len(out)} probabilities given for {n} rates")
    total = sum(out, Fraction(0))
    if total != 1:
        raise ProbabilityError(f"probabilities sum to {total}, not 1")
    return tuple(out)


@dataclass(frozen=True)
class RateScenario:
    """Possible future exchange rates, optionally with exact rational probabilities.

    Rates are quote-currency per base-currency (e.g. USD per EUR). Without
    ``probabilities`` every state is equally likely.
    """

    rates: tuple[float, ...]
    probabilities: tuple[Fraction, ...] | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=True)

    def __post_init__(self) -> None:
        rates = tuple(check_rate(r, f"rates[{i}]") for i, r in enumerate(self.rates))
        if not rates:
            raise ValidationError("a scenario needs at least one rate")
        object.__setattr__(self, "rates", rates)
        if self.probabilities is not None:
            object.__setattr__(
                self, "probabilities", _check_probabilities(self.probabilities, len(rates))
            )
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self) -> int:
        return len(self.rates)

    @property
    def n(self) -> int:
        return len(self.rates)

    @property
    def is_uniform(self) -> bool:
        """True when all states are equally likely."""
        if self.probabilities is None:
            return True
        return all(p * self.n == 1 for p in self.probabilities)

    def reciprocal(self) -> RateScenario:
        """Same states priced in the opposite direction (every rate inverted)."""
        return RateScenario(tuple(1.0 / r for r in self.rates), self.probabilities, self.metadata)

    def scaled(self, lam: float) -> RateScenario:
        return RateScenario(tuple(lam * r for r in self.rates), self.probabilities, self.metadata)

    def array(self) -> np.ndarray:
        return np.asarray(self.rates, dtype=np.float64)


def as_rates(s: RateScenario | Sequence[float] | np.ndarray, *, allow_weighted: bool = False) -> np.ndarray:
    """Coerce a scenario or a plain sequence into a validated 1-D float64 array.

    Equal-probability aggregators refuse weighted scenarios unless
    ``allow_weighted`` is set, so probabilities are never silently dropped.
    """
    if isinstance(s, RateScenario):
        if not allow_weighted and not s.is_uniform:
            raise ProbabilityError(
                "this aggregator assumes equally likely states; expand the scenario "
                "or use weighted_geometric_mean"
            )
        return s.array()
    arr = np.array(s, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValidationError("a scenario needs at least one rate")
    # NaN makes min() NaN, which fails the comparison
    if not (arr.min() > 0.0 and arr.max() < np.inf):
        bad = int(np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))[0])
        check_rate(arr[bad], f"rates[{bad}]")
    return arr
