"""Exception types raised by the engine."""


class DampedQError(Exception):
    """Base class for all engine errors."""


class DegreeOverflow(DampedQError):
    """A polynomial result would exceed the supported total degree."""


class NonIntegrable(DampedQError):
    """The real part of a Gaussian exponent is not positive definite."""


class SingularWidth(DampedQError):
    """The heat operator maps a Gaussian onto a degenerate width."""


class SingularTime(DampedQError):
    """A closed-form star-exponential is evaluated at a pole."""


class UnsupportedOperands(DampedQError):
    """A star product was requested between two non-polynomial symbols."""


class ZeroNorm(DampedQError):
    """Normalization of a vector with zero norm."""


class TruncationTail(DampedQError):
    """A symbol carries non-negligible weight at the truncation boundary."""
