"""Laurent data of Gamma(s) zeta(s)^beta at s = 1, the residue polynomial
Psi_beta(z), and the residue at s = 0.

Coefficients come from the Cauchy formula on a circle around s = 1,
discretized by the trapezoidal rule (spectrally accurate for periodic,
analytic integrands).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BranchError, DomainError, NonConvergenceError
from .special_functions import gamma_complex, zeta_complex

DEFAULT_RADIUS = 0.25
DEFAULT_NODES = 512
DEFAULT_DEPTH = 4
_IMAG_DISCARD = 1e-10


@dataclass(frozen=True)
class LaurentExpansion:
    """Gamma(s) zeta^beta(s) = sum_j principal[j]/(s-1)^(j+1) + sum_n analytic[n] (s-1)^n."""

    beta: int
    principal: tuple[float, ...]
    analytic: tuple[float, ...]
    radius: float
    imag_residual: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "principal": list(self.principal),
            "analytic": list(self.analytic),
            "radius": self.radius,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentExpansion":
        return cls(int(data["beta"]), tuple(data["principal"]), tuple(data["analytic"]),
                   float(data["radius"]))

    def log_coefficients(self) -> np.ndarray:
        """Coefficients c_j with Psi_beta(z) = (1/z) sum_j c_j log(z)^j.

        c_j = (-1)^j lambda_j / j!; these are the a_n^(beta) of the residue term.
        """
        return np.array([(-1) ** j * lam / math.factorial(j) for j, lam in enumerate(self.principal)])


def circle_coefficients(f, center: complex, radius: float, nodes: int, orders) -> np.ndarray:
    """Taylor/Laurent coefficients c_k of f around ``center``, trapezoid on a circle."""
    phi = 2.0 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * phi)
    vals = f(center + w)
    return np.array([np.mean(vals * w ** (-k)) for k in orders])


def _gamma_zeta_power(beta: int):
    def f(s):
        return gamma_complex(s) * zeta_complex(s) ** beta
    return f


def laurent_extract(beta: int, depth: int = DEFAULT_DEPTH, radius: float = DEFAULT_RADIUS,
                    nodes: int = DEFAULT_NODES) -> LaurentExpansion:
    """Principal part lambda_0..lambda_{beta-1} and analytic part a_0..a_depth at s = 1.

    Raises:
        NonConvergenceError: if ``nodes`` and ``nodes // 2`` disagree beyond 1e-8.
    """
    if beta < 1:
        raise DomainError("beta must be >= 1")
    if not 0 <= depth <= 8:
        raise DomainError("depth must be in 0..8")
    if not 0 < radius < 1:
        raise DomainError("radius must lie in (0, 1) to exclude the pole of Gamma at 0")
    orders = list(range(-beta, 0)) + list(range(0, depth + 1))
    f = _gamma_zeta_power(beta)
    fine = circle_coefficients(f, 1.0, radius, nodes, orders)
    coarse = circle_coefficients(f, 1.0, radius, nodes // 2, orders)
    gap = float(np.max(np.abs(fine - coarse)))
    if gap > 1e-8:
        raise NonConvergenceError(f"circle quadrature unstable: node halving moves coefficients by {gap:.2e}")
    imag = float(np.max(np.abs(fine.imag)))
    if imag > _IMAG_DISCARD:
        raise NonConvergenceError(f"coefficients not real to {_IMAG_DISCARD:g} (max imag {imag:.2e})")
    # orders -beta..-1 map to lambda_{beta-1}..lambda_0
    principal = tuple(float(c) for c in fine[:beta].real[::-1])
    analytic = tuple(float(c) for c in fine[beta:].real)
    return LaurentExpansion(beta, principal, analytic, radius, imag)


@lru_cache(maxsize=32)
def cached_expansion(beta: int) -> LaurentExpansion:
    return laurent_extract(beta)


def check_branch(z: complex) -> complex:
    z = complex(z)
    if z == 0 or abs(math.atan2(z.imag, z.real)) >= 0.5 * math.pi:
        raise BranchError(f"|Arg z| must be < pi/2, got z = {z}")
    return z


def psi_beta(beta: int, z, expansion: LaurentExpansion | None = None):
    """Residue at s = 1 of Gamma(s) zeta^beta(s) z^{-s}.

    Equal to (1/z) * sum_j (-1)^j lambda_j log(z)^j / j!, principal log.
    Accepts scalar or array z; raises BranchError outside |Arg z| < pi/2.
    """
    exp_ = expansion if expansion is not None else cached_expansion(beta)
    if exp_.beta != beta:
        raise DomainError("expansion computed for a different beta")
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr == 0) or np.any(np.abs(np.angle(z_arr)) >= 0.5 * np.pi):
        raise BranchError("|Arg z| must be < pi/2")
    coef = exp_.log_coefficients()
    logz = np.log(z_arr)
    poly = np.zeros_like(z_arr)
    for c in coef[::-1]:
        poly = poly * logz + c
    out = poly / z_arr
    return complex(out) if out.ndim == 0 else out


def residue_at_zero(beta: int, z=None) -> float:
    """Residue at s = 0 of Gamma(s) zeta^beta(s) z^{-s}: zeta(0)^beta = (-1/2)^beta.

    The pole of Gamma at 0 is simple with residue 1 and z^{-s} is 1 there, so
    the value does not depend on z; ``z`` is accepted for interface symmetry.
    """
    if z is not None:
        check_branch(z)
    return (-0.5) ** beta


def numeric_residue(beta: int, z: complex, center: float, radius: float = 0.25,
                    nodes: int = 512) -> complex:
    """Residue of Gamma(s) zeta^beta(s) z^{-s} at ``center`` by circle quadrature."""
    logz = np.log(complex(z))

    def f(s):
        return gamma_complex(s) * zeta_complex(s) ** beta * np.exp(-s * logz)

    return complex(circle_coefficients(f, center, radius, nodes, [-1])[0])
