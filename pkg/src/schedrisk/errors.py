"""Exception hierarchy."""

from __future__ import annotations


class SchedRiskError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SchedRiskError):
    """Malformed project file (syntax or structural problems)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}" + (f", column {column}" if column is not None else "") + f": {message}"
        super().__init__(message)


class UnknownActivityError(SchedRiskError):
    """An activity id was referenced that does not exist in the network."""


class CycleError(SchedRiskError):
    """The precedence graph contains a cycle."""


class SamplingError(SchedRiskError):
    """Rejection resampling exhausted its attempt budget."""


class ComputationError(SchedRiskError):
    """A result is undefined for the given inputs (degenerate project, inconsistent estimates)."""
