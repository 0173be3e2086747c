"""Exception hierarchy shared by all modules.

The CLI maps :class:`UsageError` to exit code 2 and every other
:class:`TauberLabError` to exit code 1.
"""


class TauberLabError(Exception):
    """Base class for all library errors."""


class UsageError(TauberLabError):
    """Malformed input: bad JSON, unknown spec kind, invalid parameter."""


class DomainError(TauberLabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InsufficientDataError(TauberLabError):
    pass


class TruncationError(TauberLabError):
    """A supremum or product could not be certified on the cached index range."""


class PreconditionError(TauberLabError):
    """A hypothesis flag required by the operation is false."""


class AcutenessError(TauberLabError):
    pass


class SolidityError(TauberLabError):
    pass


class AccuracyError(TauberLabError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class CapabilityError(TauberLabError):
    """Requested derivative order, dimension, or atom kind is not supported."""


class IntegrabilityError(TauberLabError):
    pass


class DivergentProductError(TauberLabError):
    pass


class ResolutionError(TauberLabError):
    pass


class InvariantViolation(TauberLabError):
    """A sampled inequality failed; ``witness`` holds the offending input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConditioningWarning(UserWarning):
    """Evaluation point is within 1e-12 of the tube boundary."""
