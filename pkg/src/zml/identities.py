"""Seeded randomized checks of the classical identities behind the special functions."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .special_functions import chi_factor, gamma_complex, zeta_complex

DEFAULT_POINTS = 1000
DEFAULT_THRESHOLD = 1e-9


@dataclass
class IdentityResult:
    name: str
    max_residual: float
    points: int
    passed: bool


def _away_from_integers(s: np.ndarray, margin: float = 1e-2) -> np.ndarray:
    near = (np.abs(s.imag) < margin) & (np.abs(s.real - np.round(s.real)) < margin)
    return s[~near]


def _sample(rng, n, sigma, t):
    # |Im s| uniform in [t_lo, t_hi] with a random sign
    sign = rng.choice([-1.0, 1.0], size=3 * n)
    s = rng.uniform(*sigma, size=3 * n) + 1j * sign * rng.uniform(*t, size=3 * n)
    return _away_from_integers(s)[:n]


def _rel(a, b):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)


def functional_equation(s):
    # inside the critical strip both sides use the Euler-Maclaurin evaluator
    lhs = zeta_complex(s)
    rhs = chi_factor(s) * zeta_complex(1 - s)
    return np.abs(lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))


def gamma_recurrence(s):
    return _rel(gamma_complex(s + 1), s * gamma_complex(s))


def gamma_reflection(s):
    return np.abs(gamma_complex(s) * gamma_complex(1 - s) * np.sin(np.pi * s) / np.pi - 1.0)


def chi_product(s):
    return np.abs(chi_factor(s) * chi_factor(1 - s) - 1.0)


def conjugation(s):
    z = _rel(zeta_complex(np.conj(s)), np.conj(zeta_complex(s)))
    g = _rel(gamma_complex(np.conj(s)), np.conj(gamma_complex(s)))
    return np.maximum(z, g)


SUITE = (
    ("functional_equation", functional_equation, (0.0, 1.0), (1.0, 500.0)),
    ("gamma_recurrence", gamma_recurrence, (-2.0, 8.0), (0.0, 100.0)),
    ("gamma_reflection", gamma_reflection, (-4.5, 5.0), (0.0, 100.0)),
    ("chi_product", chi_product, (-4.5, 5.0), (0.0, 500.0)),
    ("conjugation", conjugation, (-4.5, 8.0), (0.0, 500.0)),
)


def run_identity_suite(seed: int = 0, points: int = DEFAULT_POINTS,
                       threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Evaluate every identity on ``points`` seeded random points.

    Returns a dict with one IdentityResult per identity, ``passed`` and ``seconds``.
    """
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    results = []
    for name, check, sigma, t in SUITE:
        s = _sample(rng, points, sigma, t)
        worst = float(np.max(check(s)))
        results.append(IdentityResult(name, worst, int(s.size), bool(worst < threshold)))
    return {
        "seed": seed,
        "threshold": threshold,
        "results": [asdict(r) for r in results],
        "passed": all(r.passed for r in results),
        "seconds": time.perf_counter() - start,
    }
