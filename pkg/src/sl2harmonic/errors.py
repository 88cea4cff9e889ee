"""Exception hierarchy.

Two families are distinguished because the command line maps them to
different exit codes: precondition failures (bad input, poles, grid
mismatches) and numerical-contract failures (a tolerance or a declared
accuracy could not be met).
"""


class Sl2Error(Exception):
    """Base class for all package errors."""


class PreconditionError(Sl2Error, ValueError):
    """An input lies outside the documented domain of an operation."""


class PoleError(PreconditionError):
    """Evaluation requested at a pole (Gamma argument, linear factor, ...)."""


class DomainError(PreconditionError):
    """Argument outside the admissible set, e.g. ``s`` not in ``D_n``."""


class GridMismatchError(PreconditionError):
    """Two samples that must share a K-type or grid do not."""


class NumericalError(Sl2Error, ArithmeticError):
    """A numerical contract could not be honoured."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ToleranceNotMet(NumericalError):
    """Quadrature did not reach the requested tolerance."""


class SeriesNonConvergence(NumericalError):
    """A power series was asked for outside its declared accuracy range."""


class InsufficientDecay(NumericalError):
    """A spectral integrand does not decay fast enough to be truncated."""


class TailNotResolved(NumericalError):
    """An exponential tail could not be fitted on the supplied grid."""


class StripTooNarrow(NumericalError):
    """A multiplier is not holomorphic on the strip required for ``p``."""


class DerivativeUnavailable(NumericalError):
    """A multiplier derivative cannot be produced."""
