"""Exception hierarchy.  Each class carries the CLI exit code it maps to."""


class BSQError(Exception):
    exit_code = 1


class ParseError(BSQError, ValueError):
    """Malformed input: bad JSON, bad rational, bad cover spec."""

    exit_code = 2


class InconsistencyError(BSQError):
    """A computation contradicted its own well-formedness checks."""

    exit_code = 3


class DomainError(BSQError, ValueError):
    """Input is well-formed but outside the domain of the operation."""

    exit_code = 4


class InvariantError(BSQError, ValueError):
    """Input violates a structural invariant (e.g. d o d != 0)."""

    exit_code = 5


class NumericalRankError(InconsistencyError):
    """Floating rank could not be certified at the requested tolerance."""
