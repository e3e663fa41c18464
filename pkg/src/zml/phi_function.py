"""Phi_beta(z) = sum_n d_beta(n) e^{-nz} - Psi_beta(z), computed three ways:

* ``phi_direct``    - the exponential series minus the residue polynomial;
* ``phi_halfline``  - the Mellin-Barnes integral on Re s = 1/2 (or any 0 < sigma < 1);
* ``phi_reflected`` - the integral on Re s = -alpha plus the residue at s = 0.

Also the Cahen-Mellin identity used after reflection and the T1 + T2 + T3
series that the reflected integral expands into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .divisor_sums import MAX_TABLE, divisor_table, exp_truncation, running_max
from .errors import BranchError, DomainError, SlowDecayError, ToleranceUnreachableError
from .laurent_residues import psi_beta, residue_at_zero
from .quadrature import IntegralEstimate, integrate, uniform_breakpoints
from .special_functions import DEFAULT_STRIP, gamma_complex, log_gamma_envelope, loggamma, zeta_complex

MIN_DECAY = 0.01
_MATRIX_CHUNK = 1 << 21


@dataclass(frozen=True)
class PolarArgument:
    """z = modulus * exp(i angle) with |angle| < pi/2."""

    modulus: float
    angle: float

    def __post_init__(self):
        if not self.modulus > 0:
            raise DomainError("modulus must be positive")
        if not abs(self.angle) < 0.5 * math.pi:
            raise BranchError("|angle| must be < pi/2")

    @classmethod
    def from_delta(cls, x: float, delta: float) -> "PolarArgument":
        """x * exp(i (pi/2 - delta)), the ray used throughout the J analysis."""
        return cls(x, 0.5 * math.pi - delta)

    @classmethod
    def from_complex(cls, z: complex) -> "PolarArgument":
        return cls(abs(z), math.atan2(z.imag, z.real))

    @property
    def z(self) -> complex:
        return self.modulus * complex(math.cos(self.angle), math.sin(self.angle))

    @property
    def log(self) -> complex:
        return complex(math.log(self.modulus), self.angle)

    def conj(self) -> "PolarArgument":
        return PolarArgument(self.modulus, -self.angle)

    def reciprocal_conj(self) -> "PolarArgument":
        """1 / conj(z): same angle, inverted modulus."""
        return PolarArgument(1.0 / self.modulus, self.angle)


def _as_polar(z) -> PolarArgument:
    return z if isinstance(z, PolarArgument) else PolarArgument.from_complex(complex(z))


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re s = abscissa, truncated at |t| <= t_max (None: automatic)."""

    abscissa: float = 0.5
    t_max: float | None = None
    tol: float = 1e-10

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.t_max is not None and not self.t_max > 0:
            raise DomainError("t_max must be positive")


def _zeta_growth(sigma: float) -> float:
    """Exponent of a polynomial majorant of |zeta(sigma + it)|, with a log margin."""
    return max(0.5, 0.5 - sigma) + 0.25


def truncation_height(sigma: float, log_modulus: float, angle: float, power: int, tol: float,
                      gamma_power: float = 1.0) -> float:
    """Smallest t >= t_threshold with
    |Gamma(sigma+it)|^gamma_power-envelope * (1+t)^(power*growth) * |z^{-s}| < tol / 10.
    """
    decay = 0.5 * math.pi * gamma_power - abs(angle)
    if decay < MIN_DECAY:
        raise SlowDecayError(f"integrand decays like exp(-{decay:.3g} t); too slow to truncate")
    growth = power * _zeta_growth(sigma)
    target = math.log(tol / 10.0)

    def log_bound(t):
        return (gamma_power * log_gamma_envelope(sigma, t) + growth * math.log1p(t)
                - sigma * log_modulus + abs(angle) * t)

    lo = DEFAULT_STRIP.t_threshold
    if log_bound(lo) < target:
        return lo
    hi = 2.0 * lo
    while log_bound(hi) >= target:
        lo, hi = hi, 2.0 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if log_bound(mid) < target:
            hi = mid
        else:
            lo = mid
    return hi


def _panel_width(t_max: float, log_modulus: float, power: int) -> float:
    rate = (1.0 + 0.5 * power) * math.log(2.0 + t_max) + abs(log_modulus) + 1.0
    return min(2.0, 0.5 * math.pi / rate)


def _line_integral(power: int, sigma: float, logz: complex, t_max: float, tol: float) -> IntegralEstimate:
    """(1/2pi) * integral over |t| <= t_max of Gamma(s) zeta^power(s) exp(-s logz), s = sigma + it."""

    def f(t):
        s = sigma + 1j * t
        return np.exp(loggamma(s) - s * logz) * zeta_complex(s) ** power / (2.0 * math.pi)

    width = _panel_width(t_max, logz.real, power)
    left = uniform_breakpoints(-t_max, 0.0, width)
    right = uniform_breakpoints(0.0, t_max, width)
    bps = np.concatenate([left, right[1:]])
    est = integrate(f, bps, tol=tol)
    return est


# ---------------------------------------------------------------------------
# direct series


def exp_sum_many(beta: int, z: np.ndarray, tol: float, n_cap: int = MAX_TABLE) -> np.ndarray:
    """sum_{n>=1} d_beta(n) exp(-n z) for each entry of z (Re z > 0), tail < tol."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.real <= 0):
        raise DomainError("the exponential series needs Re z > 0")
    out = np.empty_like(z)
    # Terms needed per point, bucketed to powers of two.
    rates = z.real
    uniq = np.unique(rates)
    n_for_rate = {}
    for r in uniq:
        n = exp_truncation(beta, float(r), tol)
        if n > n_cap:
            raise ToleranceUnreachableError(
                f"series needs {n} terms at Re z = {r:.3g}, capacity is {n_cap}")
        n_for_rate[r] = n
    n_terms = np.array([n_for_rate[r] for r in rates])
    table = divisor_table(beta, int(n_terms.max())).as_float()
    for n in np.unique(n_terms):
        mask = n_terms == n
        zz = z[mask]
        k = np.arange(1, n + 1, dtype=float)
        d = table[1 : n + 1]
        rows = max(1, _MATRIX_CHUNK // int(n))
        res = np.empty_like(zz)
        for i in range(0, zz.size, rows):
            blk = zz[i : i + rows]
            res[i : i + rows] = np.exp(-blk[:, None] * k[None, :]) @ d
        out[mask] = res
    return out


def phi_direct(beta: int, z, tol: float = 1e-12) -> complex:
    """Phi_beta(z) from the exponential series (tail below ``tol``) minus Psi_beta(z).

    Raises:
        ToleranceUnreachableError: when Re z is so small that the series needs
            more terms than the divisor-table capacity.
    """
    p = _as_polar(z)
    if tol <= 0:
        raise DomainError("tol must be positive")
    zc = p.z
    return complex(exp_sum_many(beta, np.array([zc]), tol)[0] - psi_beta(beta, zc))


def phi_direct_many(beta: int, z: np.ndarray, tol: float = 1e-12, n_cap: int = MAX_TABLE) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return exp_sum_many(beta, z, tol, n_cap) - psi_beta(beta, z)


def zeta_negative_integer(k: int) -> float:
    """zeta(-k) = -B_{k+1}/(k+1) for k >= 0."""
    from scipy.special import bernoulli

    if k == 0:
        return -0.5
    return float(-bernoulli(k + 1)[k + 1] / (k + 1))


def phi_small_z_series(beta: int, z, order: int = 7):
    """Residues of Gamma(s) zeta^beta(s) z^{-s} at s = 0, -1, ..., -order.

    Returns (value, size of the last odd term kept); even k >= 2 vanish because
    zeta has trivial zeros there. For beta = 1 this is the convergent Taylor
    series of 1/(e^z - 1) - 1/z; for beta >= 2 it is asymptotic and misses
    exponentially small oscillatory terms.
    """
    z = np.asarray(z, dtype=complex)
    val = np.full_like(z, zeta_negative_integer(0) ** beta)
    last = np.zeros(z.shape)
    for k in range(1, order + 1, 2):
        term = (-1) ** k / math.factorial(k) * zeta_negative_integer(k) ** beta * z ** k
        val = val + term
        last = np.abs(term)
    return val, last


# ---------------------------------------------------------------------------
# contour representations


def phi_halfline(beta: int, z, spec: ContourSpec | None = None) -> IntegralEstimate:
    """Phi_beta(z) = (1/2 pi i) * integral over Re s = sigma of Gamma(s) zeta^beta(s) z^{-s} ds.

    Any abscissa 0 < sigma < 1 gives the same value (no poles in between).

    Raises:
        SlowDecayError: when pi/2 - |Arg z| < 0.01.
    """
    p = _as_polar(z)
    spec = spec or ContourSpec()
    sigma = spec.abscissa
    if not 0.0 < sigma < 1.0:
        raise DomainError("abscissa must lie strictly between 0 and 1")
    t_max = spec.t_max or truncation_height(sigma, math.log(p.modulus), p.angle, beta, spec.tol)
    est = _line_integral(beta, sigma, p.log, t_max, 0.5 * spec.tol)
    return IntegralEstimate(est.value, est.abs_err + spec.tol / 10.0, est.nodes, est.panels)


def phi_reflected(beta: int, zbar_inv, alpha: float = 0.25, spec: ContourSpec | None = None) -> IntegralEstimate:
    """Phi_beta at w = 1/conj(zbar) via the line Re s = -alpha plus the residue at s = 0.

    Phi_beta(w) = Res_{s=0} + (1/2 pi i) * integral over Re s = -alpha of
    Gamma(s) zeta^beta(s) w^{-s} ds. ``zbar_inv`` is the evaluation point w.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    p = _as_polar(zbar_inv)
    spec = spec or ContourSpec(abscissa=-alpha)
    sigma = -alpha
    t_max = spec.t_max or truncation_height(sigma, math.log(p.modulus), p.angle, beta, spec.tol)
    est = _line_integral(beta, sigma, p.log, t_max, 0.5 * spec.tol)
    res0 = residue_at_zero(beta, p.z)
    return IntegralEstimate(est.value + res0, est.abs_err + spec.tol / 10.0, est.nodes, est.panels)


def cahen_mellin_inverse(u: complex, abscissa: float, tol: float = 1e-10) -> IntegralEstimate:
    """(1/2 pi i) * integral over Re w = abscissa of Gamma(w) u^{-w} dw; equals exp(-u)."""
    if abscissa <= 0:
        raise DomainError("abscissa must be positive (right of the poles of Gamma)")
    u = complex(u)
    arg = math.atan2(u.imag, u.real)
    if abs(arg) >= 0.5 * math.pi - MIN_DECAY:
        raise SlowDecayError("u must satisfy |Arg u| < pi/2 for the inversion integral to converge")
    logu = complex(math.log(abs(u)), arg)
    t_max = truncation_height(abscissa, logu.real, arg, 0, tol)
    est = _line_integral(0, abscissa, logu, t_max, 0.5 * tol)
    return IntegralEstimate(est.value, est.abs_err + tol / 10.0, est.nodes, est.panels)


def cahen_mellin_target(beta: int, n: int, z, sign: int) -> complex:
    """((2 pi)^beta n conj(z) e^{-sign i (beta-2) pi/2})^{1/(beta-1)}, principal root."""
    p = _as_polar(z)
    # Track the argument explicitly so the root uses the intended branch.
    log_mod = beta * math.log(2.0 * math.pi) + math.log(n) + math.log(p.modulus)
    arg = -p.angle - sign * (beta - 2) * 0.5 * math.pi
    arg = math.remainder(arg, 2.0 * math.pi)
    q = 1.0 / (beta - 1)
    return complex(math.exp(q * log_mod) * math.cos(q * arg), math.exp(q * log_mod) * math.sin(q * arg))


def shifted_cahen_mellin_check(beta: int, n: int, z, alpha: float, tol: float = 1e-10) -> float:
    """Largest |numeric w-line integral - exp(-u)| over both rotation signs.

    The line sits at Re w = (beta-1)(1+alpha) - beta/2 + 1 and u is
    ``cahen_mellin_target(beta, n, z, +-1)``.

    Raises:
        SlowDecayError: if a root u has nonpositive real part.
    """
    if beta < 2:
        raise DomainError("beta must be >= 2")
    c = (beta - 1) * (1.0 + alpha) - 0.5 * beta + 1.0
    worst = 0.0
    for sign in (1, -1):
        u = cahen_mellin_target(beta, n, z, sign)
        if u.real <= 0:
            raise SlowDecayError(f"root lands at Re u = {u.real:.3g} <= 0")
        est = cahen_mellin_inverse(u, c, tol)
        worst = max(worst, abs(est.value - np.exp(-u)))
    return float(worst)


# ---------------------------------------------------------------------------
# T1 + T2 + T3


class TSum(NamedTuple):
    t1: float
    t2: complex
    t3: float


def _tsum_params(beta: int, y: float):
    q = 1.0 / (beta - 1)
    expo = (0.5 * beta - 1.0) * q
    scale = (2.0 * math.pi) ** (beta * q) * y ** q
    prefactor = y ** (1.0 - expo)
    return q, expo, scale, prefactor


def t2_terms(beta: int, y: float, delta: float, n: np.ndarray) -> np.ndarray:
    """Summands of T2 without the y prefactor:
    d_beta(n) n^{-e} exp(i (2 pi)^{beta/(beta-1)} n^{1/(beta-1)} y^{1/(beta-1)} e^{i delta/(beta-1)}).
    """
    q, expo, scale, _ = _tsum_params(beta, y)
    n = np.asarray(n)
    d = divisor_table(beta, int(n.max())).as_float()[n]
    phase = 1j * scale * n.astype(float) ** q * np.exp(1j * delta * q)
    return d * n.astype(float) ** (-expo) * np.exp(phase)


def _tsum_terms_needed(beta: int, rate: float, expo_tol: float) -> int:
    """N with max d * exp(-rate * N^{1/(beta-1)}) well below expo_tol."""
    q = 1.0 / (beta - 1)
    if rate * MAX_TABLE ** q <= math.log(MAX_TABLE / expo_tol):
        raise ToleranceUnreachableError("T-series needs more terms than the table capacity")
    n = 8
    while True:
        if n > MAX_TABLE:
            raise ToleranceUnreachableError("T-series needs more terms than the table capacity")
        dmax = running_max(beta, n)[n]
        if rate * n ** q > math.log(dmax * n / expo_tol):
            return 2 * n
        n *= 2


def phi_tsum(beta: int, y: float, delta: float, alpha: float, tol: float = 1e-12) -> TSum:
    """The three series T1, T2, T3 of the reflected expansion at height y.

    T1 = y^{-alpha} sum d(n) n^{-1-alpha}, returned as y^{-alpha} zeta(1+alpha)^beta
    (the series converges too slowly to sum directly); T2 is complex and
    oscillatory, T3 real and exponentially small.
    """
    if beta < 2:
        raise DomainError("beta must be >= 2")
    if not y > 1:
        raise DomainError("y must exceed 1")
    if not 0.0 < delta < 0.5 * math.pi:
        raise DomainError("delta must lie in (0, pi/2)")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    q, expo, scale, pref = _tsum_params(beta, y)
    t1 = y ** (-alpha) * float(zeta_complex(1.0 + alpha).real) ** beta

    rate2 = scale * math.sin(delta * q)
    n2 = _tsum_terms_needed(beta, rate2, tol / max(pref, 1.0))
    n = np.arange(1, n2 + 1)
    t2 = pref * complex(np.sum(t2_terms(beta, y, delta, n)))

    rate3 = scale * math.sin((math.pi - delta) * q)
    n3 = _tsum_terms_needed(beta, rate3, tol / max(pref, 1.0))
    n = np.arange(1, n3 + 1)
    d = divisor_table(beta, n3).as_float()[1 : n3 + 1]
    nf = n.astype(float)
    t3 = pref * float(np.sum(d * nf ** (-expo) * np.exp(-rate3 * nf ** q)))
    return TSum(t1, t2, t3)


def t2_majorant(beta: int, y: float, delta: float, tol: float = 1e-14) -> float:
    """Termwise triangle-inequality bound on |T2|."""
    q, expo, scale, pref = _tsum_params(beta, y)
    rate = scale * math.sin(delta * q)
    n_terms = _tsum_terms_needed(beta, rate, tol)
    n = np.arange(1, n_terms + 1)
    d = divisor_table(beta, n_terms).as_float()[1 : n_terms + 1]
    nf = n.astype(float)
    return pref * float(np.sum(d * nf ** (-expo) * np.exp(-rate * nf ** q)))
