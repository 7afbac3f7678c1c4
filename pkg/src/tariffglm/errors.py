"""Exception types shared across the package."""

from __future__ import annotations


class TariffGLMError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TariffGLMError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataError(TariffGLMError, ValueError):
    """Malformed or inconsistent input data (CSV cells, schemas, levels)."""


class FormulaError(TariffGLMError, ValueError):
    """Model-formula syntax or semantic error.

    ``position`` is the 0-based character index where parsing failed,
    or None for semantic errors without a single location.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class RankDeficiencyError(TariffGLMError, ValueError):
    """Design matrix is column-rank-deficient (the dummy trap).

    ``dependent_columns`` names the columns that are linear combinations
    of earlier ones.
    """

    def __init__(self, message: str, dependent_columns: tuple[str, ...] = ()):
        super().__init__(message)
        self.dependent_columns = dependent_columns


class NonConvergenceError(TariffGLMError, RuntimeError):
    """Iterative fitting failed to converge.

    ``trace`` holds the deviance after each completed iteration.
    """

    def __init__(self, message: str, trace: tuple[float, ...] = ()):
        super().__init__(message)
        self.trace = trace


class NestingError(TariffGLMError, ValueError):
    """Two fits cannot be compared as nested models."""
