"""Randomised audit of aggregators against the three axioms.

A1 symmetry      A(sigma s) == A(s)
A2 scaling       A(lambda s) == lambda A(s)
A3 reciprocity   A(1/s) == 1 / A(s)

Aggregators are treated as black boxes. Rates and scale factors are drawn
log-uniformly from a seeded generator, so the same configuration always
yields the same report.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .aggregators import Aggregator
from .errors import ValidationError
from .reciprocity import ReciprocityFunction

__all__ = [
    "AuditConfig",
    "AxiomResult",
    "AuditReport",
    "Samples",
    "draw_samples",
    "check_symmetry",
    "check_scaling",
    "check_reciprocity",
    "check_reciprocity_function",
    "audit",
]

AXIOMS = ("A1", "A2", "A3")
AXIOM_NAMES = {"A1": "symmetry", "A2": "scaling", "A3": "reciprocity", "beta": "reciprocity function"}


@dataclass(frozen=True)
class AuditConfig:
    """Sampling setup for an audit.

    ``rate_log_range`` and ``scale_log_range`` are base-10 exponent bounds:
    the default rate range ``(-4, 4)`` means rates in [1e-4, 1e4].
    ``arities`` is used for aggregators that accept any ``n``.
    """

    sample_count: int = 1000
    rate_log_range: tuple[float, float] = (-4.0, 4.0)
    scale_log_range: tuple[float, float] = (-6.0, 6.0)
    tolerance: float = 1e-9
    seed: int = 0
    arities: tuple[int, ...] = (2, 3, 4, 5, 6)

    def __post_init__(self) -> None:
        if int(self.sample_count) < 1:
            raise ValidationError("sample_count must be a positive integer")
        for name in ("rate_log_range", "scale_log_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"{name} must be a nonempty finite interval, got {(lo, hi)}")
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ValidationError("tolerance must be positive")
        if not self.arities or any(int(n) < 1 for n in self.arities):
            raise ValidationError("arities must be a nonempty list of positive integers")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    worst_violation: float
    witness: dict[str, Any] | None = None
    error: str | None = None

    @property
    def label(self) -> str:
        return AXIOM_NAMES.get(self.axiom, self.axiom)


@dataclass(frozen=True)
class AuditReport:
    aggregator: str
    seed: int
    sample_count: int
    tolerance: float
    results: tuple[AxiomResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def failed_axioms(self) -> list[str]:
        return [r.axiom for r in self.results if not r.passed]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def render(self) -> str:
        lines = [
            f"audit of {self.aggregator}: {'PASS' if self.passed else 'FAIL'} "
            f"(samples={self.sample_count}, seed={self.seed}, tolerance={self.tolerance:g})"
        ]
        for r in self.results:
            status = "pass" if r.passed else "FAIL"
            lines.append(f"  {r.axiom} {r.label:<20} {status}  worst={r.worst_violation:.3e}")
            if r.error:
                lines.append(f"      error: {r.error}")
            if not r.passed and r.witness:
                lines.append(f"      witness: {_fmt_witness(r.witness)}")
        return "\n".join(lines)


def _fmt_witness(w: dict[str, Any]) -> str:
    return ", ".join(f"{k}={v}" for k, v in w.items())


@dataclass(frozen=True)
class Samples:
    """Shared sample stream: scenarios grouped by arity, with global indices."""

    groups: tuple[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray], ...]
    # each group: (index, rates (m, n), perms (m, n), lambdas (m,))
    count: int


def draw_samples(agg: Aggregator, cfg: AuditConfig) -> Samples:
    rng = np.random.default_rng(int(cfg.seed))
    arities = np.array([agg.arity] if agg.arity is not None else sorted(set(cfg.arities)))
    m = int(cfg.sample_count)
    which = rng.integers(0, len(arities), size=m)
    lo, hi = cfg.rate_log_range
    slo, shi = cfg.scale_log_range
    groups = []
    for k, n in enumerate(arities):
        idx = np.flatnonzero(which == k)
        if idx.size == 0:
            continue
        n = int(n)
        rates = 10.0 ** rng.uniform(lo, hi, size=(idx.size, n))
        perms = rng.permuted(np.tile(np.arange(n), (idx.size, 1)), axis=1)
        lams = 10.0 ** rng.uniform(slo, shi, size=idx.size)
        groups.append((idx, rates, perms, lams))
    return Samples(tuple(groups), m)


def _evaluate(agg: Aggregator, X: np.ndarray) -> np.ndarray:
    try:
        return agg.evaluate_many(X)
    except Exception:
        # locate the first row that fails so the error carries a witness
        for row in X:
            try:
                agg.func(row)
            except Exception as exc:
                raise _EvalFailure(row, exc) from exc
        raise


class _EvalFailure(Exception):
    def __init__(self, row: np.ndarray, exc: BaseException):
        super().__init__(str(exc))
        self.row = row
        self.exc = exc


def _relative(dev: np.ndarray) -> np.ndarray:
    dev = np.abs(dev)
    return np.where(np.isnan(dev), np.inf, dev)


def _run_check(axiom: str, agg: Aggregator, samples: Samples, tol: float) -> AxiomResult:
    violations = np.zeros(samples.count)
    witness_data: dict[int, dict[str, Any]] = {}
    try:
        for idx, X, P, lam in samples.groups:
            base = _evaluate(agg, X)
            if axiom == "A1":
                Y = np.take_along_axis(X, P, axis=1)
                dev = _evaluate(agg, Y) / base - 1.0
            elif axiom == "A2":
                dev = _evaluate(agg, X * lam[:, None]) / (lam * base) - 1.0
            else:
                dev = _evaluate(agg, 1.0 / X) * base - 1.0
            bad = ~(np.isfinite(base) & (base > 0))
            v = _relative(dev)
            v[bad] = np.inf
            violations[idx] = v
            j = int(np.argmax(v))
            witness_data[int(idx[j])] = _witness(axiom, X[j], P[j], lam[j], base[j])
    except _EvalFailure as fail:
        return AxiomResult(
            axiom, False, math.inf,
            {"rates": fail.row.tolist()},
            f"evaluation failed: {type(fail.exc).__name__}: {fail.exc}",
        )
    except Exception as exc:
        return AxiomResult(axiom, False, math.inf, None, f"evaluation failed: {type(exc).__name__}: {exc}")
    # first maximum wins: ties go to the lowest sample index
    i = int(np.argmax(violations))
    worst = float(violations[i])
    # groups list indices in ascending order, so the global first maximum is also its group's
    return AxiomResult(axiom, bool(worst <= tol), worst, witness_data[i])


def _witness(axiom: str, x: np.ndarray, perm: np.ndarray, lam: float, value: float) -> dict[str, Any]:
    w: dict[str, Any] = {"rates": x.tolist(), "value": float(value)}
    if axiom == "A1":
        w["permutation"] = perm.tolist()
    elif axiom == "A2":
        w["scale"] = float(lam)
    else:
        w["transform"] = "reciprocal"
    return w


def check_symmetry(agg: Aggregator, cfg: AuditConfig | None = None) -> AxiomResult:
    """Max of |A(sigma s) / A(s) - 1| over random permutations."""
    cfg = cfg or AuditConfig()
    return _run_check("A1", agg, draw_samples(agg, cfg), cfg.tolerance)


def check_scaling(agg: Aggregator, cfg: AuditConfig | None = None) -> AxiomResult:
    """Max of |A(lambda s) / (lambda A(s)) - 1| over log-uniform lambda."""
    cfg = cfg or AuditConfig()
    return _run_check("A2", agg, draw_samples(agg, cfg), cfg.tolerance)


def check_reciprocity(agg: Aggregator, cfg: AuditConfig | None = None) -> AxiomResult:
    """Max of |A(1/s) * A(s) - 1|; a nonzero value is a round-trip arbitrage."""
    cfg = cfg or AuditConfig()
    return _run_check("A3", agg, draw_samples(agg, cfg), cfg.tolerance)


def audit(agg: Aggregator, cfg: AuditConfig | None = None) -> AuditReport:
    """Run all three checks on one shared sample stream."""
    cfg = cfg or AuditConfig()
    samples = draw_samples(agg, cfg)
    results = tuple(_run_check(a, agg, samples, cfg.tolerance) for a in AXIOMS)
    return AuditReport(agg.name, int(cfg.seed), int(cfg.sample_count), float(cfg.tolerance), results)


def check_reciprocity_function(beta: ReciprocityFunction, cfg: AuditConfig | None = None) -> AxiomResult:
    """Sample ``u in [1, 10**span)^(n-1)`` and measure |beta(u) * beta(reversed u) - 1|.

    ``span`` is the width of the configured rate exponent range, i.e. the
    largest ratio two sampled rates could have.
    """
    cfg = cfg or AuditConfig()
    rng = np.random.default_rng(int(cfg.seed))
    span = cfg.rate_log_range[1] - cfg.rate_log_range[0]
    U = 10.0 ** rng.uniform(0.0, span, size=(int(cfg.sample_count), beta.arity))
    worst, witness = -1.0, None
    try:
        for u in U:
            dev = abs(beta(u) * beta(u[::-1]) - 1.0)
            if math.isnan(dev):
                dev = math.inf
            if dev > worst:
                worst, witness = dev, {"u": u.tolist()}
    except Exception as exc:
        return AxiomResult("beta", False, math.inf, {"u": u.tolist()}, f"evaluation failed: {exc}")
    return AxiomResult("beta", bool(worst <= cfg.tolerance), float(worst), witness)


def reproduce(axiom: str, agg: Aggregator, witness: dict[str, Any]) -> float:
    """Re-evaluate the violation recorded in a witness (used to confirm failures)."""
    x = np.asarray(witness["rates"], dtype=np.float64)
    a = agg(x)
    if axiom == "A1":
        return abs(agg(x[np.asarray(witness["permutation"])]) / a - 1.0)
    if axiom == "A2":
        lam = witness["scale"]
        return abs(agg(x * lam) / (lam * a) - 1.0)
    if axiom == "A3":
        return abs(agg(1.0 / x) * a - 1.0)
    raise ValueError(f"unknown axiom {axiom!r}")


def audit_many(aggs: Sequence[Aggregator], cfg: AuditConfig | None = None) -> list[AuditReport]:
    return [audit(a, cfg) for a in aggs]
