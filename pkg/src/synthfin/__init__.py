"""Synthetic financial return generation and evaluation at desk scale."""

from .errors import (
    ConfigError,
    ContractError,
    DegenerateSeriesError,
    DivergenceError,
    DomainError,
    FitError,
    InfeasibilityError,
    InputError,
    InsufficientDataError,
    MalformedInputError,
    ShapeError,
    SingularityError,
    SynthFinError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContractError", "DegenerateSeriesError", "DivergenceError", "DomainError",
    "FitError", "InfeasibilityError", "InputError", "InsufficientDataError", "MalformedInputError",
    "ShapeError", "SingularityError", "SynthFinError", "__version__",
]
