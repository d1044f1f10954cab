"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class WeightValidationError(DomainError):
    """Trust weights do not lie in [0, 1] or do not sum to 1."""


class LedgerError(ValueError):
    """A rating event violates ledger invariants."""


class LedgerFormatError(ValueError):
    """A persisted ledger file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownAgentError(LookupError):
    pass


class ScenarioError(ValueError):
    """A scenario file failed validation. ``field`` names the offending location."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
