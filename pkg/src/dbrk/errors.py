"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class DbrkError(Exception):
    """Base class for every error raised by dbrk."""


class DomainError(DbrkError, ValueError):
    """An index or parameter is outside the range where the quantity is defined."""


class ParameterPole(DbrkError, ZeroDivisionError):
    """A Pochhammer factor of the lower hypergeometric parameter vanished."""


class NoConvergence(DbrkError, ArithmeticError):
    """A series was asked for outside its region of convergence."""


class Unmatched(DbrkError, ValueError):
    """Gamma arguments cannot be paired with integer differences."""


class Undefined(DbrkError, ArithmeticError):
    """A Gamma ratio has a numerator pole not cancelled by the denominator."""


class IntegralityError(DbrkError, AssertionError):
    """A sum that must be an integer reduced to a non-integer rational."""


class SingularPoint(DbrkError, ValueError):
    """Evaluation requested at a point where the function is not defined."""


class QuadratureFailure(DbrkError, ArithmeticError):
    """An integral could not be computed to the requested accuracy."""

    def __init__(self, message: str, value=None, error_estimate: float = float("nan")):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class MaxSubdivisions(QuadratureFailure):
    """Adaptive quadrature ran out of subdivisions; best estimate attached."""


class SingularityUnresolved(QuadratureFailure):
    """Refinement toward an integrable singularity stalled."""


class NotConverging(DbrkError, ArithmeticError):
    """Radial extrapolation iterates do not settle."""


class CancellationError(DbrkError, ArithmeticError):
    """Catastrophic cancellation exceeded the working precision budget."""


class NegativeNorm(DbrkError, ArithmeticError):
    """A squared norm came out negative beyond tolerance."""


class LargeImaginary(DbrkError, ArithmeticError):
    """A quantity that must be real has a large imaginary part."""
