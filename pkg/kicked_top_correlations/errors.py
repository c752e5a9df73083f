"""
Custom exceptions for the kicked top correlation toolkit.
"""

from typing import Optional


class KickedTopError(Exception):
    """Base exception class for all kicked top toolkit errors."""

    def __init__(self, message: str, details: Optional[str] = None):
        """
        Initialize a kicked top error.

        Args:
            message: A concise error message
            details: Optional additional details about the error context
        """
        self.details = details
        super().__init__(message)

    def __str__(self) -> str:
        message = super().__str__()
        if self.details:
            return f"{message} ({self.details})"
        return message


class ValidationError(KickedTopError):
    """Exception raised for input validation errors."""

    pass


class CalculationError(KickedTopError):
    """Exception raised when a numerical calculation cannot be performed."""

    pass


class ConfigurationError(KickedTopError):
    """Exception raised when an experiment is improperly configured."""

    def __init__(
        self, message: str, details: Optional[str] = None, field: Optional[str] = None
    ):
        """
        Initialize a configuration error.

        Args:
            message: A concise error message
            details: Optional additional details about the error context
            field: Name of the offending configuration field, if known
        """
        self.field = field
        super().__init__(message, details)
