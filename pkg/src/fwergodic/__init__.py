"""Dynamics, factor maps and arithmetic criteria around the p-adic digit shift."""

from .errors import (
    AllDigitsZero,
    DepthTooLarge,
    FWError,
    NotAUnit,
    PrecisionExhausted,
    PrimeMismatch,
    ZeroVector,
)
from .padic import PadicInt, from_integer, inverse_unit, random_padic, teichmuller, val_unit

__all__ = [
    "AllDigitsZero",
    "DepthTooLarge",
    "FWError",
    "NotAUnit",
    "PadicInt",
    "PrecisionExhausted",
    "PrimeMismatch",
    "ZeroVector",
    "from_integer",
    "inverse_unit",
    "random_padic",
    "teichmuller",
    "val_unit",
]

__version__ = "0.1.0"
