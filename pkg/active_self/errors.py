"""Error hierarchy for the adaptation library.

Every error carries the process exit code the CLI maps it to, so the command
line can tell config problems from data problems from broken invariants.
"""

from typing import Any, Dict, Optional


class ActiveSelfError(Exception):
    """Base class for all library errors."""

    exit_code: int = 6

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details: Dict[str, Any] = details or {}


class ConfigError(ActiveSelfError, ValueError):
    """Invalid configuration value, unknown key, or incompatible architecture."""

    exit_code = 3


class DataError(ActiveSelfError, ValueError):
    """Input data violates a documented invariant."""

    exit_code = 4


class SchemaError(DataError):
    """Required CSV columns are missing."""


class EmptyOutputError(DataError):
    """An operation would produce no output (e.g. recording shorter than a window)."""


class LookupFailure(ActiveSelfError, LookupError):
    """A named entity (subject, profile, layer) does not exist."""

    exit_code = 4


class DimensionError(ActiveSelfError, ValueError):
    """Tensor shapes do not agree."""


class ContractError(ActiveSelfError, RuntimeError):
    """An API was called out of order (e.g. backward on eval-mode activations)."""


class NonFiniteGradientError(ActiveSelfError, FloatingPointError):
    """A gradient contained NaN or inf; training aborted."""


class OracleError(ActiveSelfError, RuntimeError):
    """The label oracle failed or was asked for an index outside its range."""


class InvariantViolation(ActiveSelfError, AssertionError):
    """An internal invariant of the adaptation loop was broken."""

    exit_code = 5


class InsufficientCentersError(ContractError):
    """Fewer than two class centers: boundary categories cannot be formed."""


class CalibrationError(ActiveSelfError, RuntimeError):
    """No subject-shift magnitude put source-only accuracy inside the requested band."""
