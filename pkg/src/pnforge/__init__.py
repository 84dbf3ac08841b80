"""Polynomial PN and MOS surfaces with polynomial area element.

Exact-arithmetic construction of polynomial surfaces whose area element
is a perfect square: free families from prescribed normal fields,
Hermite interpolation of points and tangent planes, multi-patch G1
networks, and algebraic certification of every claim.
"""

from .errors import (
    AtCenter,
    ConstraintNotSatisfied,
    DegenerateFrame,
    DegenerateMedial,
    DegreeTooSmall,
    DimensionMismatch,
    Inconsistent,
    IrrationalIsotropics,
    NearCenterWarning,
    NoRealIsotropics,
    NoSafeCenter,
    NonAffineDependence,
    NotMOS,
    NotOrthogonal,
    NotProportional,
    OptimizerDiverged,
    PnforgeError,
    ZeroPolynomial,
)
from .polyalg import BiPoly, HomTriPoly, PolyVec, Q

__version__ = "0.1.0"

__all__ = [
    "BiPoly",
    "HomTriPoly",
    "PolyVec",
    "Q",
    "PnforgeError",
    "ZeroPolynomial",
    "DegreeTooSmall",
    "DimensionMismatch",
    "NonAffineDependence",
    "Inconsistent",
    "DegenerateFrame",
    "NotOrthogonal",
    "AtCenter",
    "NoSafeCenter",
    "IrrationalIsotropics",
    "NoRealIsotropics",
    "NotProportional",
    "NotMOS",
    "DegenerateMedial",
    "ConstraintNotSatisfied",
    "OptimizerDiverged",
    "NearCenterWarning",
    "__version__",
]
