"""Exception hierarchy shared by the library and the CLI."""


class SiegelError(Exception):
    """Base class for every error raised by siegelfx."""


class ValidationError(SiegelError, ValueError):
    """A value violates a domain invariant (e.g. a non-positive rate)."""


class ProbabilityError(ValidationError):
    """Probabilities are missing, out of range, or do not sum to one."""


class ArityError(SiegelError, ValueError):
    """The number of rates or ratio arguments does not match what is required."""


class DomainError(SiegelError, ValueError):
    """A scalar parameter lies outside its admissible interval."""


class ReciprocityViolation(SiegelError, ValueError):
    """A candidate reciprocity function fails beta(u) * beta(reversed u) == 1."""


class ExpansionTooLarge(SiegelError, ValueError):
    """Expanding rational probabilities would need more rates than the cap allows."""

    def __init__(self, lcm: int, cap: int):
        super().__init__(
            f"common denominator {lcm} exceeds the expansion cap {cap}; "
            "use weighted_geometric_mean instead"
        )
        self.lcm = lcm
        self.cap = cap


class ParseError(SiegelError, ValueError):
    """Malformed input file. ``position`` locates the problem (line/column or field path)."""

    def __init__(self, reason: str, position: str | None = None):
        msg = reason if position is None else f"{position}: {reason}"
        super().__init__(msg)
        self.reason = reason
        self.position = position
