"""Exception types shared across the package."""

from __future__ import annotations


class RamseyError(Exception):
    """Base class for all errors raised by this package."""


class SortError(RamseyError):
    pass


class UnsupportedFormula(RamseyError):
    """The formula is outside the fragment an operation accepts."""


class ParseError(RamseyError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{loc}{message}")
        self.message = message


class SolverError(RamseyError):
    """The backend solver failed, crashed, or returned an unusable answer."""
