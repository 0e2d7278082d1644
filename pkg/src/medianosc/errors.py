"""Exception types raised across the package."""


class MedianOscError(Exception):
    """Base class for all package errors."""


class InvalidParameter(MedianOscError, ValueError):
    pass


class IndivisibleCube(MedianOscError):
    """A cube with odd side length (or a single cell) cannot be halved."""


class FamilyTooLarge(MedianOscError):
    pass


class HypothesisViolated(MedianOscError):
    pass


class BetaTooSmall(MedianOscError):
    pass


class OverlappingPair(MedianOscError):
    pass


class DegenerateModulus(MedianOscError):
    pass


class DomainError(MedianOscError, ValueError):
    pass


class NonInvertible(MedianOscError):
    pass
