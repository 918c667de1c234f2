"""Exception hierarchy shared by all modules."""


class RiemCenterError(Exception):
    """Base class for library errors."""


class DomainError(RiemCenterError, ValueError):
    """An argument lies outside the domain on which a quantity is defined."""


class CutLocusError(DomainError):
    """No unique minimal geodesic joins the two points."""


class TangentError(DomainError):
    """A vector is not tangent at the point it is used with."""


class DegeneracyError(RiemCenterError, ArithmeticError):
    """A covariant derivative is singular or too ill-conditioned to invert."""


class SupercriticalError(DomainError):
    """The support radius D is at or beyond the critical value."""

    def __init__(self, message, d_crit):
        super().__init__(message)
        self.d_crit = d_crit


class SupportPointError(DomainError):
    """A support point of a mass distribution is unreachable from the base point."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index
