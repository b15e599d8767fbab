"""Custom exception classes for the application."""
from typing import Sequence


class CapabilityError(Exception):
    """Base class for every error raised by the capability toolkit."""
    pass


class DomainError(CapabilityError, ValueError):
    """Raised when an input lies outside the domain of an operation."""
    pass


class NumericError(CapabilityError, ArithmeticError):
    """Raised when a numerical procedure fails (non-convergence, singular matrix)."""
    pass


class ConfigError(CapabilityError):
    """Raised when an analysis configuration is invalid."""
    pass


class DataError(CapabilityError):
    """Raised when measurement data cannot be parsed."""

    def __init__(self, message: str, lines: Sequence[int] = ()):
        self.lines = list(lines)
        if self.lines:
            message = f"{message} (lines: {', '.join(str(n) for n in self.lines)})"
        super().__init__(message)


class FileOperationError(IOError):
    """Raised when a file operation (read, write) fails."""
    pass
