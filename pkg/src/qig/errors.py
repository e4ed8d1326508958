"""Exception hierarchy shared by all qig modules."""


class QigError(Exception):
    """Base class for every error raised by qig."""


class ValidationError(QigError, ValueError):
    """Malformed input: wrong shapes, non-Hermitian matrices, bad config."""


class NumericError(QigError, ArithmeticError):
    """An iterative routine failed to reach its tolerance.

    ``best`` carries the best available estimate (if any) and ``iterations``
    the amount of work spent.
    """

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class DomainError(QigError, ValueError):
    """Argument outside the domain where an operation is defined."""


class DivergenceError(DomainError):
    """The requested quantity is infinite at the given argument."""


class SingularLocusError(DomainError):
    """Evaluation on a singular locus (r = 0 for the 0D model, theta = x for 1D)."""


class DegeneracyError(QigError):
    """A non-degenerate level was required but the spectrum is degenerate there."""


class DegenerateMetricError(QigError):
    """The metric is numerically singular; curvature is undefined.

    Near zero temperature use :mod:`qig.asymptotics` instead.
    """

    def __init__(self, message, det=None):
        super().__init__(message)
        self.det = det


class IndeterminateError(QigError):
    """The low-temperature coefficient has a vanishing denominator."""
