"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map
them to their own exit code.
"""


class IgmcError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(IgmcError, ValueError):
    pass


class NumericalError(IgmcError, ArithmeticError):
    pass


class EmptySampleSet(InvalidInput):
    pass


class SupportViolation(InvalidInput):
    pass


class NonBinaryValue(InvalidInput):
    pass


class ZeroMean(InvalidInput):
    pass


class EmptyDomain(InvalidInput):
    pass


class InvalidAlpha(InvalidInput):
    pass


class ParameterOutOfRange(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class InsufficientSamples(InvalidInput):
    pass


class InvalidCounts(InvalidInput):
    pass


class QuadratureFailure(NumericalError):
    pass


class NonFiniteLoss(NumericalError):
    pass
