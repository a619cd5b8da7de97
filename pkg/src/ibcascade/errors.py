"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError (and
subclasses) -> 2, anything else -> 3.
"""

from __future__ import annotations


class IbcascadeError(Exception):
    """Base class for all package errors."""


class ConfigError(IbcascadeError):
    """Invalid configuration: bad parameter values, grids, presets, flags."""


class DataError(IbcascadeError):
    """Invalid or inconsistent input data."""


class RecordError(DataError):
    """A single input record was rejected.

    Carries enough context to point at the offending row: ``line`` is the
    1-based line number (or row index for in-memory edge lists), ``field``
    names the column when one is identifiable.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class UndefinedHistoryError(DataError):
    """A bank has no recorded trading activity up to the requested date."""


class BalanceSheetError(DataError):
    """A synthesized balance sheet would violate its identity or sign rules."""

    def __init__(self, bank: int, message: str):
        self.bank = bank
        super().__init__(f"bank {bank}: {message}")


class InvalidSeedError(DataError):
    """The requested initial defaulter is not an active net borrower."""
