"""Numerical geometry of Hua domains over classical bounded symmetric domains."""

from .cartan import CartanSpec, generic_norm
from .errors import HuaError
from .hua import EllipsoidSpec, HuaPoint, HuaSpec, classify_boundary, hua_margin, standardize

__all__ = [
    "CartanSpec",
    "EllipsoidSpec",
    "HuaError",
    "HuaPoint",
    "HuaSpec",
    "classify_boundary",
    "generic_norm",
    "hua_margin",
    "standardize",
]
