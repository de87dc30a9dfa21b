"""Cross-subject adaptation of activity classifiers with sparse oracle labels."""

from .errors import (
    ActiveSelfError,
    ConfigError,
    DataError,
    SchemaError,
    EmptyOutputError,
    LookupFailure,
    DimensionError,
    ContractError,
    NonFiniteGradientError,
    OracleError,
    InvariantViolation,
    InsufficientCentersError,
    CalibrationError,
)

__version__ = "0.1.0"

__all__ = [
    '__version__',
    'ActiveSelfError',
    'ConfigError',
    'DataError',
    'SchemaError',
    'EmptyOutputError',
    'LookupFailure',
    'DimensionError',
    'ContractError',
    'NonFiniteGradientError',
    'OracleError',
    'InvariantViolation',
    'InsufficientCentersError',
    'CalibrationError',
]
