"""Shared exception types."""

from __future__ import annotations


class CastnetError(Exception):
    """Base class for all errors raised by this package."""


class RegistryError(CastnetError):
    """A character registry failed validation (duplicate alias, empty name, ...)."""


class FormatError(CastnetError):
    """A file could not be parsed. Carries the path and 1-based line number."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        self.message = message
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")


class ValidationError(CastnetError):
    """Survey data violated a constraint (bad pair, out-of-range value, ...)."""
