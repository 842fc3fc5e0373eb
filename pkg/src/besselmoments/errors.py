"""Exception types shared across the package."""

from __future__ import annotations


class BesselMomentsError(Exception):
    """Base class for all package-specific errors."""


class PrecisionExhausted(BesselMomentsError):
    """Adaptive re-evaluation hit the precision ceiling without agreement."""


class PoleError(BesselMomentsError):
    """Function evaluated at a pole (e.g. gamma at a non-positive integer)."""


class DomainError(BesselMomentsError):
    """Argument outside the operation's domain."""


class BranchError(BesselMomentsError):
    """Argument on a branch cut."""


class NoConvergence(BesselMomentsError):
    """An iteration/level cap was reached before the requested accuracy."""


class AccelerationDisagreement(BesselMomentsError):
    """The two independent series accelerations failed to agree."""


class UnsupportedSpec(BesselMomentsError):
    """A Meijer-G or kernel spec outside the supported catalogue."""


class UnsupportedContour(BesselMomentsError):
    """Contour abscissa collides with a pole of the integrand."""


class DivergentMoment(BesselMomentsError):
    """Bessel-moment spec violates its convergence conditions."""


class ResidualImaginary(BesselMomentsError):
    """A nominally real combination kept a too-large imaginary part."""


class FrickeInconsistent(BesselMomentsError):
    """Fricke-sign probes disagreed between sample points."""


class StencilError(BesselMomentsError):
    """Finite-difference stencil cannot reach the requested derivative order."""


class UnknownIdentity(BesselMomentsError):
    """Identity id not present in the registry catalogue."""
