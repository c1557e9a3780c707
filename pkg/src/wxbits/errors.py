"""Domain error hierarchy.

Every error exposes a stable ``code`` (its class name) that the HTTP API and
CLI use to map failures onto status codes and exit codes.
"""

from __future__ import annotations


class ContestError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InvalidAllocation(ContestError):
    """Credit allocation is malformed (wrong arity, non-integers, sum != 100)."""


class InfeasibleClamp(ContestError):
    """No probability vector of the given arity can satisfy the clamp bounds."""


class DomainError(ContestError):
    """A probability argument lies outside its admissible range."""


class ArityMismatch(ContestError):
    """Two probability vectors that must share an outcome space do not."""


class UnitMismatch(ContestError):
    """Forecast/observation variable disagrees with the scoring variable."""


class EmptyInput(ContestError):
    """An aggregate operation received no records."""


class InsufficientMembers(ContestError):
    """Too few superensemble members to build a threshold baseline."""


class DegenerateEnsemble(ContestError):
    """Ensemble has too little spread (or too few members) to define bins."""


class ParseError(ContestError):
    """A member-file row failed validation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(ContestError):
    """A member file is structurally unusable (empty, bad header)."""


class UnknownGame(ContestError):
    """No game with the requested id."""


class UnknownPlayer(ContestError):
    """No scored records for the requested player."""


class WrongState(ContestError):
    """Operation not permitted in the game's current lifecycle state."""


class GameNotOpen(ContestError):
    """Submission attempted before the game opened."""


class DeadlinePassed(ContestError):
    """Submission attempted after the deadline or after locking."""


class MissingObservation(ContestError):
    """Verification requested without a complete observation set."""


class AlreadyVerified(ContestError):
    """Verification requested twice for the same game."""


class CorruptLog(ContestError):
    """Event log is unreadable: sequence gap or malformed line."""


class ConflictingEvent(ContestError):
    """Event log contains an event that is illegal given prior events."""


class ConfigError(ContestError):
    """Simulation configuration is invalid."""
