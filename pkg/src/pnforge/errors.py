"""Exception types shared across the package."""


class PnforgeError(Exception):
    """Base class for all package errors."""


class ZeroPolynomial(PnforgeError):
    pass


class DegreeTooSmall(PnforgeError):
    pass


class DimensionMismatch(PnforgeError):
    pass


class NonAffineDependence(PnforgeError):
    pass


class Inconsistent(PnforgeError):
    """The linear system has no solution at the requested degree."""

    def __init__(self, message="system is inconsistent", suggested_degree=None):
        super().__init__(message)
        self.suggested_degree = suggested_degree


class DegenerateFrame(PnforgeError):
    pass


class NotOrthogonal(PnforgeError):
    pass


class AtCenter(PnforgeError):
    pass


class NoSafeCenter(PnforgeError):
    pass


class IrrationalIsotropics(PnforgeError):
    pass


class NoRealIsotropics(PnforgeError):
    pass


class NotProportional(PnforgeError):
    pass


class NotMOS(PnforgeError):
    pass


class DegenerateMedial(PnforgeError):
    pass


class ConstraintNotSatisfied(PnforgeError):
    pass


class OptimizerDiverged(PnforgeError):
    pass


class NearCenterWarning(UserWarning):
    """Projected datum is close to the stereographic center."""
