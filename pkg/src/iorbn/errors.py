"""Exception types shared across the toolkit."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for all domain-level errors."""


class DisabledError(ModelError):
    """A step's multiset precondition does not hold in the configuration."""


class UnknownTransitionError(ModelError):
    """A step refers to a transition that is not part of the net."""


class MessageMismatchError(ModelError):
    """A receive in a broadcast step carries a different message than the broadcast."""


class UnknownStateError(ModelError):
    """A configuration, cube, or query mentions a state the net does not declare."""


class InconsistentCubeError(ModelError):
    """Some state's lower bound exceeds its upper bound."""


class EmptyRangeError(ModelError):
    """A population range is empty."""


class TargetNotCoveredError(ModelError):
    """Witness expansion was asked for a state outside the coverable set."""


class InvalidSpecError(ModelError):
    """A generator spec has an empty or nonsensical range."""


class CertificateError(ModelError):
    """A translation or saturation certificate violates its own invariants."""


class BudgetExceededError(ModelError):
    """The explicit-state node budget was hit before the search finished.

    `partial` holds the set of configurations discovered so far, so the
    caller can tell an aborted search from a completed one.
    """

    def __init__(self, message: str, partial: frozenset | None = None):
        super().__init__(message)
        self.partial = partial


class ParseError(ModelError):
    """Malformed input text; carries a 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class UndeclaredStateError(ParseError):
    """A transition, config, or query uses a name that was never declared."""


class DuplicateTransitionError(ParseError):
    """The same transition appears twice in a net file."""


class ContradictoryAtomError(ParseError):
    """A query requires a state to be both present and absent."""
