"""Arbitrage-free negotiated forward exchange rates.

Aggregators that turn a list of possible future exchange rates into one
forward rate, an audit engine for the symmetry, scaling and reciprocity
axioms, the transformation group behind them, and a CLI.
"""

from ._backend import BACKEND
from .aggregators import (
    ARITHMETIC,
    BUILTINS,
    GEOMETRIC,
    HARMONIC,
    MEDIAN,
    Aggregator,
    OrderedRatios,
    arithmetic_mean,
    beta_aggregate,
    beta_aggregator,
    consecutive_ratios,
    expand_rational_probabilities,
    extract_beta,
    geometric_mean,
    harmonic_mean,
    implied_probability,
    median_aggregate,
    mix,
    order_statistics,
    siegel_gap,
    weighted_geometric_mean,
    weighted_geometric_mean_real,
)
from .audit import (
    AuditConfig,
    AuditReport,
    AxiomResult,
    audit,
    check_reciprocity,
    check_reciprocity_function,
    check_scaling,
    check_symmetry,
)
from .errors import (
    ArityError,
    DomainError,
    ExpansionTooLarge,
    ParseError,
    ProbabilityError,
    ReciprocityViolation,
    SiegelError,
    ValidationError,
)
from .reciprocity import ReciprocityFunction, power_law_beta
from .scenario import RateScenario

__version__ = "0.1.0"
