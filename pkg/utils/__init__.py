"""
The `utils` package provides utility functions and classes for common operations
of the simulator: logging, exception types and handling, and small helpers for
unit conversion, hashing and JSON encoding.
"""

from .logger import Logger
from .helpers import Helpers
from .exception_handler import (
    ConfigurationError,
    ExceptionHandler,
    FitConvergenceError,
    NumericalLimitError,
    SimulationError,
)

__all__ = [
    "Logger",
    "Helpers",
    "ExceptionHandler",
    "SimulationError",
    "ConfigurationError",
    "NumericalLimitError",
    "FitConvergenceError",
]
