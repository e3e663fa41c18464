"""Model oscillatory integrals int G(t) e^{i F(t)} dt and their second-derivative-test certificates.

F(t) = t (log t - 1 - beta log t + beta log 2pi + beta - log n - log x)
G(t) = t^p e^{-delta t},  p = (beta - 1)(alpha + 1/2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BudgetError, DomainError, MonotonicityError
from .quadrature import DEFAULT_NODE_BUDGET, IntegralEstimate, integrate
from .special_functions import LOG_2PI

CERTIFICATE_CONSTANT = 8.0
DEFAULT_T0 = 10.0


@dataclass(frozen=True)
class PhaseSpec:
    """Parameters of the model integrand.

    ``phase_sign`` is +1 normally, -1 for the conjugate phase and 0 for the
    zero-phase diagnostic (F replaced by 0).
    """

    beta: int
    n: int
    x: float
    alpha: float
    delta: float
    phase_sign: int = 1

    def __post_init__(self):
        if self.beta < 1:
            raise DomainError("beta must be >= 1")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if not self.x > 0:
            raise DomainError("x must be positive")
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if not 0 < self.delta < 0.5 * math.pi:
            raise DomainError("delta must lie in (0, pi/2)")
        if self.phase_sign not in (-1, 0, 1):
            raise DomainError("phase_sign must be -1, 0 or 1")

    @property
    def power(self) -> float:
        return (self.beta - 1) * (self.alpha + 0.5)

    @property
    def amplitude_peak(self) -> float:
        """Location of the maximum of G."""
        return self.power / self.delta

    @property
    def _offset(self) -> float:
        # constant part of F(t)/t once the log t terms are collected
        return self.beta * LOG_2PI + self.beta - 1.0 - math.log(self.n * self.x)

    def conjugate(self) -> "PhaseSpec":
        return replace(self, phase_sign=-self.phase_sign)

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        return t ** self.power * np.exp(-self.delta * t)


def _phase_parts(spec: PhaseSpec, t):
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    b1 = 1 - spec.beta
    f = t * (b1 * lt + spec._offset)
    f1 = b1 * (lt + 1.0) + spec._offset
    f2 = b1 / t
    return f, f1, f2


def phase_eval(spec: PhaseSpec, t: float):
    """(F(t), F'(t), F''(t)) for the unsigned phase."""
    if not t > 0:
        raise DomainError("t must be positive")
    f, f1, f2 = _phase_parts(spec, t)
    return float(f), float(f1), float(f2)


def stationary_point(spec: PhaseSpec) -> float:
    """Unique root of F' on (0, inf), by bisection in log t."""
    if spec.beta < 2:
        raise DomainError("a stationary point needs beta >= 2")
    # F' is strictly decreasing in u = log t
    def d1(u):
        return (1 - spec.beta) * (u + 1.0) + spec._offset

    lo, hi = -1.0, 1.0
    while d1(lo) <= 0:
        lo *= 2
    while d1(hi) >= 0:
        hi *= 2
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if d1(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def phase_breakpoints(spec: PhaseSpec, a: float, b: float, phase_per_panel: float = 0.5 * math.pi,
                      max_panels: int | None = None) -> np.ndarray:
    """Breakpoints with at most ``phase_per_panel`` of phase change per panel."""
    pts = [a]
    t = a
    while t < b:
        step = min(t, b - t)
        if spec.phase_sign != 0:
            # |F'| is monotone between breakpoints, so checking both ends suffices
            for _ in range(50):
                _, d_lo, _ = _phase_parts(spec, t)
                _, d_hi, _ = _phase_parts(spec, t + step)
                rate = max(abs(float(d_lo)), abs(float(d_hi)))
                if rate * step <= phase_per_panel:
                    break
                step = 0.9 * phase_per_panel / rate
        t = b if t + step >= b * (1 - 1e-15) else t + step
        pts.append(t)
        if max_panels is not None and len(pts) > max_panels:
            raise BudgetError("oscillatory range needs more panels than the node budget allows")
    return np.array(pts)


def oscillatory_integral(spec: PhaseSpec, a: float, b: float, tol: float = 1e-10,
                         phase_per_panel: float = 0.5 * math.pi,
                         node_budget: int = DEFAULT_NODE_BUDGET) -> IntegralEstimate:
    """int_a^b G(t) exp(i s F(t)) dt with s = ``spec.phase_sign``."""
    if not 0 < a < b:
        raise DomainError("need 0 < a < b")
    bps = phase_breakpoints(spec, a, b, phase_per_panel, max_panels=node_budget // 21)
    sign = spec.phase_sign

    def f(t):
        g = spec.amplitude(t)
        if sign == 0:
            return g.astype(complex)
        phase, _, _ = _phase_parts(spec, t)
        return g * np.exp(1j * sign * phase)

    return integrate(f, bps, tol=tol, max_nodes=node_budget)


def second_derivative_bound(spec: PhaseSpec, a: float, b: float,
                            constant: float = CERTIFICATE_CONSTANT) -> float:
    """K * max_{[a,b]} G * (min_{[a,b]} |F''|)^{-1/2} for monotone G.

    Raises:
        MonotonicityError: if the maximum of G lies strictly inside (a, b).
    """
    if not 0 < a < b:
        raise DomainError("need 0 < a < b")
    if spec.beta < 2:
        raise DomainError("the second-derivative test needs beta >= 2")
    peak = spec.amplitude_peak
    if a < peak < b:
        raise MonotonicityError(f"amplitude peaks at t = {peak:.6g} inside ({a:g}, {b:g})")
    g_max = float(max(spec.amplitude(a), spec.amplitude(b)))
    f2_min = (spec.beta - 1) / b
    return constant * g_max / math.sqrt(f2_min)


def split_points(spec: PhaseSpec, a: float, b: float) -> list[float]:
    """[a, ..., b] split at the amplitude peak and at the stationary point when inside."""
    cuts = [c for c in (spec.amplitude_peak, stationary_point(spec)) if a < c < b]
    return [a] + sorted(cuts) + [b]


def certify(spec: PhaseSpec, a: float, b: float, tol: float = 1e-10) -> list[dict]:
    """Integral and certificate on each monotone piece of [a, b]."""
    pts = split_points(spec, a, b)
    rows = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        est = oscillatory_integral(spec, lo, hi, tol)
        cert = second_derivative_bound(spec, lo, hi)
        rows.append({
            "beta": spec.beta, "n": spec.n, "x": spec.x, "alpha": spec.alpha, "delta": spec.delta,
            "a": lo, "b": hi, "re_value": est.value.real, "im_value": est.value.imag,
            "abs_err": est.abs_err, "certificate": cert,
        })
    return rows


def certificate_growth(beta: int, delta: float, epsilon: float = 0.1, t0: float = DEFAULT_T0,
                       n: int = 1, x: float = 1.0) -> float:
    """Certificate over [t0, peak] with alpha = epsilon / (2 (beta - 1))."""
    alpha = epsilon / (2.0 * (beta - 1))
    spec = PhaseSpec(beta, n, x, alpha, delta)
    peak = spec.amplitude_peak
    if not peak > t0:
        raise DomainError(f"amplitude peak {peak:.4g} is not above t0 = {t0:g}")
    return second_derivative_bound(spec, t0, peak)
