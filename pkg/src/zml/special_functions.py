"""Complex Gamma, Riemann zeta, the functional-equation factor chi(s), and
the Stirling modulus envelope used to truncate contour integrals.

All functions accept a scalar or a numpy array. Scalars come back as Python
``complex`` (or ``float`` for the envelope), arrays as complex128 arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli

from .errors import DomainError, PoleError
from .parallel import map_ordered

LOG_2PI = math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)
HALF_LOG_2PI = 0.5 * LOG_2PI

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

# Euler-Maclaurin correction: B_2k / (2k)! for k = 1..15.
_EM_ORDER = 15
_BERN = bernoulli(2 * _EM_ORDER)
_EM_COEF = np.array([_BERN[2 * k] / math.factorial(2 * k) for k in range(1, _EM_ORDER + 1)])

_POLE_TOL = 1e-14
_MATRIX_CHUNK = 1 << 21


@dataclass(frozen=True)
class StripBound:
    """Vertical strip plus the height beyond which asymptotic envelopes apply."""

    sigma_low: float = -5.0
    sigma_high: float = 10.0
    t_threshold: float = 10.0

    def __post_init__(self):
        if not self.sigma_low < self.sigma_high:
            raise DomainError("sigma_low must be below sigma_high")
        if not self.t_threshold > 0:
            raise DomainError("t_threshold must be positive")


DEFAULT_STRIP = StripBound()


def _as_complex(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


def _check_gamma_poles(s: np.ndarray) -> None:
    k = np.round(s.real)
    bad = (k <= 0) & (np.abs(s - k) < _POLE_TOL)
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at s = {complex(s[bad].flat[0])}")


def log_sinpi(s):
    """A logarithm of sin(pi s), stable for large |Im s|.

    The branch is arbitrary (callers exponentiate or take the real part).
    """
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    out = np.empty_like(s)
    y = s.imag
    small = np.abs(y) < 5.0
    pos = y >= 5.0
    neg = y <= -5.0
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.sin(np.pi * s[small]))
    sp = s[pos]
    out[pos] = -1j * np.pi * sp + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * sp))
    sn = s[neg]
    out[neg] = 1j * np.pi * sn + np.log(-0.5j) + np.log1p(-np.exp(-2j * np.pi * sn))
    return complex(out[0]) if scalar else out


def _lanczos_loggamma(s: np.ndarray) -> np.ndarray:
    """log Gamma(s) for Re s >= 1/2 (not the principal branch)."""
    z = s - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, _LANCZOS_COEF.size):
        acc = acc + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def loggamma(s):
    """A logarithm of Gamma(s); exp() of it is Gamma(s), its real part log|Gamma(s)|."""
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    _check_gamma_poles(s)
    out = np.empty_like(s)
    right = s.real >= 0.5
    out[right] = _lanczos_loggamma(s[right])
    left = ~right
    sl = s[left]
    out[left] = LOG_PI - log_sinpi(sl) - _lanczos_loggamma(1.0 - sl)
    return complex(out[0]) if scalar else out


def gamma_complex(s):
    """Gamma(s) for complex s.

    Lanczos approximation for Re s >= 1/2 and the reflection formula
    otherwise, both carried out in logarithmic form so that the factor
    exp(-pi |t| / 2) does not underflow before it is combined.

    Raises:
        PoleError: if s lies within 1e-14 of a nonpositive integer.
    """
    val = np.exp(loggamma(s))
    return complex(val) if np.ndim(val) == 0 else val


def _em_terms(t_abs: np.ndarray) -> np.ndarray:
    n = np.maximum(20, np.ceil(1.3 * t_abs)).astype(np.int64)
    # Round up to a coarse geometric grid so nearby heights share one matrix.
    step = np.maximum(1, 2 ** np.maximum(0, np.floor(np.log2(n)).astype(np.int64) - 4))
    return ((n + step - 1) // step) * step


def _zeta_em_block(s: np.ndarray, n_terms: int) -> np.ndarray:
    logn = np.log(np.arange(1, n_terms, dtype=float))
    rows = max(1, _MATRIX_CHUNK // n_terms)
    chunks = [s[i:i + rows] for i in range(0, s.size, rows)]

    def partial(chunk):
        return np.exp(-chunk[:, None] * logn[None, :]).sum(axis=1)

    head = np.concatenate(map_ordered(partial, chunks))
    log_n = math.log(n_terms)
    n_pow = np.exp(-s * log_n)
    res = head + n_terms * n_pow / (s - 1.0) + 0.5 * n_pow
    term = s * n_pow / n_terms
    res = res + _EM_COEF[0] * term
    inv_n2 = 1.0 / (n_terms * n_terms)
    for k in range(2, _EM_ORDER + 1):
        term = term * (s + 2 * k - 3) * (s + 2 * k - 2) * inv_n2
        res = res + _EM_COEF[k - 1] * term
    return res


def _zeta_em(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s)
    if s.size == 0:
        return out
    n = _em_terms(np.abs(s.imag))
    for n_terms in np.unique(n):
        mask = n == n_terms
        out[mask] = _zeta_em_block(s[mask], int(n_terms))
    return out


def _reflection_factor(s: np.ndarray) -> np.ndarray:
    """2^s pi^(s-1) sin(pi s/2) Gamma(1-s), i.e. chi(s), for Re s < 1/2."""
    out = np.empty_like(s)
    small = np.abs(s.imag) < 5.0
    ss = s[small]
    out[small] = np.exp(ss * LOG_2PI - LOG_PI + loggamma(1.0 - ss)) * np.sin(0.5 * np.pi * ss)
    sb = s[~small]
    out[~small] = np.exp(sb * LOG_2PI - LOG_PI + log_sinpi(0.5 * sb) + loggamma(1.0 - sb))
    return out


def zeta_complex(s):
    """Riemann zeta function for complex s != 1.

    Euler-Maclaurin summation with N = max(20, ceil(1.3 |t|)) terms and
    Bernoulli corrections up to order 30 for Re s >= 0; the functional
    equation for Re s < 0.

    Raises:
        PoleError: if |s - 1| < 1e-14.
    """
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    if np.any(np.abs(s - 1.0) < _POLE_TOL):
        raise PoleError("zeta has a pole at s = 1")
    out = np.empty_like(s)
    # near s = 0 the reflection would hit the pole of zeta(1 - s); summation is fine there
    right = (s.real >= 0.0) | (np.abs(s) < 0.25)
    out[right] = _zeta_em(s[right])
    left = ~right
    if np.any(left):
        sl = s[left]
        out[left] = _reflection_factor(sl) * _zeta_em(1.0 - sl)
    return complex(out[0]) if scalar else out.reshape(np.shape(s))


def chi_factor(s):
    """chi(s) = (2 pi)^s / (2 Gamma(s) cos(pi s / 2)), so zeta(s) = chi(s) zeta(1-s).

    Raises:
        PoleError: at odd integers, where cos(pi s / 2) vanishes.
    """
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    k = np.round(s.real)
    if np.any((np.abs(s - k) < _POLE_TOL) & (np.mod(k, 2) == 1)):
        raise PoleError("chi(s) divides by cos(pi s/2) = 0 at odd integers")
    out = np.empty_like(s)
    right = s.real >= 0.5
    sr = s[right]
    out[right] = np.exp(sr * LOG_2PI - math.log(2.0) - loggamma(sr) - log_sinpi(0.5 * (sr + 1.0)))
    out[~right] = _reflection_factor(s[~right])
    return complex(out[0]) if scalar else out


def log_gamma_envelope(sigma, t, bound: StripBound = DEFAULT_STRIP):
    """Logarithm of the Stirling envelope sqrt(2 pi) |t|^(sigma-1/2) exp(-pi |t|/2)."""
    t_abs = np.abs(np.asarray(t, dtype=float))
    if np.any(t_abs < bound.t_threshold):
        raise DomainError(f"|t| must be >= {bound.t_threshold} for the Stirling envelope")
    val = HALF_LOG_2PI + (np.asarray(sigma) - 0.5) * np.log(t_abs) - 0.5 * np.pi * t_abs
    return float(val) if np.ndim(val) == 0 else val


def gamma_envelope(sigma, t, bound: StripBound = DEFAULT_STRIP):
    """Stirling modulus envelope of |Gamma(sigma + i t)|.

    Raises:
        DomainError: for |t| below ``bound.t_threshold``.
    """
    val = np.exp(log_gamma_envelope(sigma, t, bound))
    return float(val) if np.ndim(val) == 0 else val
