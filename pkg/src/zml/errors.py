"""Exception hierarchy.

The CLI maps these onto exit codes: budget and tolerance failures exit 3,
validation failures exit 4.
"""


class ZmlError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(ZmlError, ZeroDivisionError):
    """Evaluation requested at (or numerically on top of) a pole."""


class DomainError(ZmlError, ValueError):
    """Argument outside the domain where the operation is defined."""


class BranchError(DomainError):
    """Argument outside the principal-branch sector |Arg z| < pi/2."""


class DegenerateInputError(DomainError):
    """Not enough (or invalid) data for a fit."""


class MonotonicityError(DomainError):
    """Amplitude is not monotonic on the requested interval."""


class DivisorOverflowError(ZmlError, OverflowError):
    """A divisor-function value would overflow 64-bit unsigned integers."""


class BudgetError(ZmlError):
    """The computation would exceed the configured work or memory budget."""


class CapacityError(BudgetError):
    """A table larger than the configured capacity would be required."""


class ToleranceUnreachableError(BudgetError):
    """The requested tolerance cannot be met within capacity."""


class SlowDecayError(BudgetError):
    """Integrand decays too slowly for a finite truncation."""


class NonConvergenceError(ZmlError):
    """Two refinement levels disagree beyond the allowed threshold."""


class ValidationError(ZmlError):
    """A numerical identity check failed."""
