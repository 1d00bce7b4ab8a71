"""Exception hierarchy shared by the numerical modules and the CLI."""

from typing import Optional


class PolarError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PolarError, ValueError):
    """Invalid input: malformed channel file, bad parameter, label or dimension mismatch."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class BudgetExceededError(PolarError):
    """Exact computation refused because it would exceed the configured dimension budget."""

    def __init__(self, what: str, needed: int, limit: int):
        self.needed = needed
        self.limit = limit
        super().__init__(
            f"{what} needs dimension {needed}, budget is {limit}; "
            "rerun with --mode bounds or a smaller --n"
        )


class InvariantViolation(PolarError):
    """A computed table failed re-validation before it was emitted."""
