"""Exception types raised by the drmmse package.

Every error raised on purpose by this package derives from :class:`DrmmseError`,
so callers can catch one base class at API boundaries.
"""


class DrmmseError(Exception):
    """Base class for all package errors."""


class InvalidInput(DrmmseError):
    """An argument is malformed: wrong shape/ndim, non-finite entries, bad scalar."""


class DimensionMismatch(InvalidInput):
    """Two or more arguments have mutually inconsistent dimensions."""


class NotPsd(DrmmseError):
    """A matrix required to be positive semidefinite has a significantly negative eigenvalue."""


class NotPositiveDefinite(DrmmseError):
    """A matrix required to be strictly positive definite is singular or indefinite."""


class InvalidGradient(DrmmseError):
    """A direction matrix handed to the linear maximization oracle is not symmetric PSD."""


class OutOfDomain(DrmmseError):
    """A scalar argument lies outside the open domain of the function (e.g. gamma <= lambda_max)."""


class InvalidConfig(DrmmseError):
    """A solver configuration value is out of range or the variant name is unknown."""


class UncenteredIntercept(DrmmseError):
    """The affine estimator's intercept is not the one centered at the nominal means."""
