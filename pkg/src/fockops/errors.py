"""Exceptions and warnings raised by fockops."""


class FockError(Exception):
    """Base class for all fockops errors."""


class FockOverflowError(FockError, OverflowError):
    """An exponential left the double-precision range."""


class NoFiniteFixedPoint(FockError, ValueError):
    """A pure translation ``z + b`` (b != 0) has no fixed point in the plane."""


class UnboundedOperator(FockError, ValueError):
    """A norm was requested for an operator that is not bounded on F^2."""


class UnsupportedWeight(FockError, ValueError):
    """The weight is outside the class handled by the closed-form classifier."""


class InvalidWeight(FockError, ValueError):
    """The weight is structurally invalid (e.g. empty polynomial)."""


class NonConvergenceError(FockError, RuntimeError):
    """A truncation did not settle before the maximum dimension.

    The partial :class:`~fockops.numerics.ConvergenceRecord` is kept on
    ``record`` so callers can report it.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class PrecisionWarning(UserWarning):
    """Parameters outside the range where double precision is comfortable."""
