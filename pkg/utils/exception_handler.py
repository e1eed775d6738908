import logging
import traceback
from typing import Any, Dict, Optional

logger = logging.getLogger("exception_handler")


class SimulationError(Exception):
    """Base class for errors raised by the multihop simulator."""


class ConfigurationError(SimulationError, ValueError):
    """
    Raised when a scenario or run configuration violates an invariant.

    Args:
        field (str): Name of the offending configuration key.
        rule (str): The rule that was violated.
    """

    def __init__(self, field: str, rule: str):
        self.field = field
        self.rule = rule
        super().__init__(f"{field}: {rule}")


class NumericalLimitError(SimulationError):
    """
    Raised when a finite-difference limit estimate is unusable.

    The probe values that produced the estimate are kept in `diagnostics`.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        details = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        super().__init__(f"{message} ({details})" if details else message)


class FitConvergenceError(SimulationError):
    """Raised when an extreme-value fit does not produce usable parameters."""


class ExceptionHandler:
    """
    Handles exceptions gracefully so a failing command leaves a usable log trail.
    """

    @staticmethod
    def log_and_handle_exception(exc: Exception, context: str = "Unknown"):
        """
        Logs the exception details and gracefully handles the exception.

        Args:
            exc (Exception): The exception instance.
            context (str): Context in which the exception occurred.
        """
        logger.error("Exception occurred in context '%s': %s", context, exc)
        logger.error("Traceback: %s", traceback.format_exc())

    @staticmethod
    def suppress_exceptions(exc: Exception, context: str = "Suppressed"):
        """
        Suppresses exceptions while logging them for debugging purposes.

        Args:
            exc (Exception): The exception instance.
            context (str): Context in which the exception occurred.
        """
        logger.warning("Suppressed exception in context '%s': %s", context, exc)
