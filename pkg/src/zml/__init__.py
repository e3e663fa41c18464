"""Numerical laboratory for Laplace-transform moments of the Riemann zeta function."""

from .errors import (
    BranchError,
    BudgetError,
    DegenerateInputError,
    DomainError,
    MonotonicityError,
    PoleError,
    ValidationError,
    ZmlError,
)
from .quadrature import IntegralEstimate
from .special_functions import chi_factor, gamma_complex, loggamma, zeta_complex

__version__ = "0.1.0"
