"""Moments of zeta on the critical line and the Phi-integral they bridge to.

* J_beta(delta) = int_0^inf |zeta(1/2+it)|^{2 beta} e^{-delta t} dt
* M_beta(T)     = int_0^T  |zeta(1/2+it)|^{2 beta} dt
* Parseval: (1/2pi) int |Gamma zeta^beta(1/2+it)|^2 e^{(pi-2 delta) t} dt
            = int_0^inf |Phi_beta(x e^{i(pi/2-delta)})|^2 dx
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaincc, gamma as real_gamma

from .divisor_sums import exp_truncation
from .errors import BudgetError, DomainError, ToleranceUnreachableError
from .laurent_residues import cached_expansion
from .phi_function import (
    PolarArgument,
    phi_direct_many,
    phi_reflected,
    phi_small_z_series,
    t2_majorant,
)
from .quadrature import DEFAULT_NODE_BUDGET, IntegralEstimate, integrate, uniform_breakpoints
from .special_functions import loggamma, zeta_complex

DELTA_MIN = 1e-3
# |zeta(1/2+it)| <= C * max(1, t)^{1/4} on the heights used here (checked in tests).
ZETA_ENVELOPE_C = 3.0
# Exponential-series capacity when integrating |Phi|^2 near x = 0.
PHI_SERIES_CAP = 1 << 16
_PHI_TOL = 1e-12


@dataclass
class DecompositionReport:
    """Pieces of int_0^inf |Phi_beta(x e^{i(pi/2 - delta)})|^2 dx.

    j1 = int_1^inf, j3 = int_0^split, j4 = int_split^1 with split = delta^{(beta-1)/2};
    total is integrated independently of the split. Fields not computed are None.
    """

    beta: int
    delta: float
    split_point: float | None = None
    j1: float | None = None
    j3: float | None = None
    j4: float | None = None
    total: float | None = None
    parseval_lhs: float | None = None
    parseval_rhs: float | None = None
    o1_correction: float | None = None
    j6: float | None = None
    pieces_err: float | None = None
    total_err: float | None = None
    parseval_lhs_err: float | None = None

    @property
    def parseval_rel_diff(self) -> float:
        return abs(self.parseval_lhs - self.parseval_rhs) / abs(self.parseval_lhs)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_delta(delta: float, delta_min: float = DELTA_MIN) -> None:
    if not delta > 0:
        raise DomainError("delta must be positive")
    if delta < delta_min:
        raise BudgetError(f"delta = {delta:g} is below delta_min = {delta_min:g}")


def critical_power(beta: int, t: np.ndarray) -> np.ndarray:
    """|zeta(1/2 + i t)|^{2 beta}."""
    if beta == 0:
        return np.ones_like(np.asarray(t, dtype=float))
    return np.abs(zeta_complex(0.5 + 1j * np.asarray(t, dtype=float))) ** (2 * beta)


def laplace_tail_bound(beta: int, delta: float, t_cut: float, c: float = ZETA_ENVELOPE_C) -> float:
    """Upper bound of int_{t_cut}^inf |zeta(1/2+it)|^{2 beta} e^{-delta t} dt from |zeta| <= c t^{1/4}."""
    p = 0.5 * beta + 1.0
    return c ** (2 * beta) * float(gammaincc(p, delta * t_cut) * real_gamma(p)) / delta ** p


def laplace_cutoff(beta: int, delta: float, tol: float, c: float = ZETA_ENVELOPE_C) -> float:
    """Solve t = (log(1/tol) + beta log t + log(c^{2 beta}/delta)) / delta by iteration."""
    t = max(1.0 / delta, 1.0)
    for _ in range(100):
        new = (math.log(1.0 / tol) + beta * math.log(t) + math.log(c ** (2 * beta) / delta)) / delta
        if abs(new - t) < 1e-9 * t:
            break
        t = new
    t = max(t, 1.0)
    while laplace_tail_bound(beta, delta, t, c) > 0.1 * tol:
        t *= 1.1
    return t


def j_moment(beta: int, delta: float, tol: float = 1e-6, rtol: float = 0.0,
             delta_min: float = DELTA_MIN, node_budget: int = DEFAULT_NODE_BUDGET,
             panel_width: float = 2.0) -> IntegralEstimate:
    """Laplace transform J_beta(delta) of |zeta(1/2+it)|^{2 beta}.

    The integral is cut at t_cut where the envelope tail drops below tol/10;
    that tail bound is included in ``abs_err``.

    Raises:
        BudgetError: for delta < delta_min or if the node budget is exhausted.
    """
    if beta < 0:
        raise DomainError("beta must be >= 0")
    _check_delta(delta, delta_min)
    t_cut = laplace_cutoff(beta, delta, tol)
    if 21.0 * t_cut / panel_width > node_budget:
        raise BudgetError(f"t_cut = {t_cut:.3g} exceeds the node budget")

    def f(t):
        return critical_power(beta, t) * np.exp(-delta * t)

    est = integrate(f, uniform_breakpoints(0.0, t_cut, panel_width), tol=0.9 * tol, rtol=rtol,
                    max_nodes=node_budget)
    tail = laplace_tail_bound(beta, delta, t_cut)
    return IntegralEstimate(est.value, est.abs_err + tail, est.nodes, est.panels)


def m_moment(beta: int, T: float, tol: float = 1e-6, rtol: float = 0.0,
             node_budget: int = DEFAULT_NODE_BUDGET, panel_width: float = 2.0) -> IntegralEstimate:
    """M_beta(T) = int_0^T |zeta(1/2+it)|^{2 beta} dt."""
    if not T > 0:
        raise DomainError("T must be positive")
    if beta < 0:
        raise DomainError("beta must be >= 0")
    return integrate(lambda t: critical_power(beta, t), uniform_breakpoints(0.0, T, panel_width),
                     tol=tol, rtol=rtol, max_nodes=node_budget)


# ---------------------------------------------------------------------------
# Parseval left side


def _parseval_integrand(beta: int, delta: float):
    def f(t):
        s = 0.5 + 1j * t
        log_g2 = 2.0 * loggamma(s).real
        return np.exp(log_g2 + (math.pi - 2.0 * delta) * t) * critical_power(beta, t) / (2.0 * math.pi)
    return f


def parseval_negative_half(beta: int, delta: float, tol: float = 1e-10, t_neg: float = 40.0) -> IntegralEstimate:
    """Left side of the Parseval identity restricted to -t_neg <= t <= 0."""
    return integrate(_parseval_integrand(beta, delta), uniform_breakpoints(-t_neg, 0.0, 2.0), tol=tol)


def parseval_lhs(beta: int, delta: float, tol: float = 1e-8, rtol: float = 1e-10,
                 delta_min: float = DELTA_MIN) -> IntegralEstimate:
    """(1/2 pi) int_{-inf}^{inf} |Gamma(1/2+it) zeta^beta(1/2+it)|^2 e^{(pi - 2 delta) t} dt."""
    _check_delta(delta, delta_min)
    # (1/2pi)|Gamma(1/2+it)|^2 e^{pi t} <= 1, so the t > 0 tail is a J-type tail with rate 2 delta.
    t_pos = laplace_cutoff(beta, 2.0 * delta, tol)
    neg = parseval_negative_half(beta, delta, tol=0.1 * tol)
    pos = integrate(_parseval_integrand(beta, delta), uniform_breakpoints(0.0, t_pos, 2.0),
                    tol=0.8 * tol, rtol=rtol)
    tail = laplace_tail_bound(beta, 2.0 * delta, t_pos)
    total = neg + pos
    return IntegralEstimate(total.value, total.abs_err + tail, total.nodes, total.panels)


# ---------------------------------------------------------------------------
# |Phi|^2 integrals


def _psi_sq_poly(beta: int, theta: float) -> np.ndarray:
    """Coefficients (ascending) of Q(L) = |P(L + i theta)|^2 where Psi = e^{-i theta} P(log z)/x."""
    c = cached_expansion(beta).log_coefficients()
    # P(L + i theta) as a polynomial in L: expand each (L + i theta)^j binomially.
    p = np.zeros(len(c), dtype=complex)
    for j, cj in enumerate(c):
        for k in range(j + 1):
            p[k] += cj * math.comb(j, k) * (1j * theta) ** (j - k)
    q = np.convolve(p, np.conj(p))
    return q.real


def _upper_gamma_int(k: int, a: float) -> float:
    """int_a^inf u^k e^{-u} du for integer k >= 0 and any real a."""
    if math.isinf(a):
        return 0.0
    s = sum(a ** j / math.factorial(j) for j in range(k + 1))
    return math.factorial(k) * math.exp(-a) * s


def psi_sq_integral(beta: int, delta: float, a: float, b: float) -> float:
    """int_a^b |Psi_beta(x e^{i(pi/2-delta)})|^2 dx in closed form (0 < a < b <= inf)."""
    if not 0 < a < b:
        raise DomainError("need 0 < a < b")
    q = _psi_sq_poly(beta, 0.5 * math.pi - delta)
    la = math.log(a)
    lb = math.log(b) if math.isfinite(b) else math.inf
    return float(sum(qk * (_upper_gamma_int(k, la) - _upper_gamma_int(k, lb)) for k, qk in enumerate(q)))


def _series_floor(beta: int, delta: float, n_cap: int) -> float:
    """Smallest x at which the exponential series fits within n_cap terms."""
    s = math.sin(delta)
    lo, hi = 1e-9, 1.0
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        try:
            ok = exp_truncation(beta, mid, _PHI_TOL) <= n_cap
        except ToleranceUnreachableError:
            ok = False
        if ok:
            hi = mid
        else:
            lo = mid
    return hi / s


def _series_ceiling(delta: float, tol: float) -> float:
    """x beyond which the exponential series is negligible next to Psi."""
    return max(2.0, (math.log(1.0 / tol) + 20.0) / math.sin(delta))


def _phi_sq_small_x(beta: int, delta: float, a: float, b: float, tol: float) -> IntegralEstimate:
    theta = 0.5 * math.pi - delta
    rot = complex(math.cos(theta), math.sin(theta))
    if beta == 1:
        def f(x):
            z = x * rot
            return np.abs(1.0 / np.expm1(z) - 1.0 / z) ** 2
        return integrate(f, np.geomspace(max(a, 1e-300), b, 8) if a > 0 else [0.0, b], tol=tol)

    # Asymptotic residue series, valid while the oscillatory remainder is negligible.
    _, last = phi_small_z_series(beta, b * rot)
    osc = t2_majorant(beta, max(1.0 / b, 1.0 + 1e-9), delta) if 1.0 / b > 1.0 else math.inf
    if osc + float(last) < 1e-3 * tol:
        def f(x):
            val, _ = phi_small_z_series(beta, x * rot)
            return np.abs(val) ** 2
        est = integrate(f, [a, b], tol=tol)
        return IntegralEstimate(est.value, est.abs_err + 2.0 * b * (osc + float(last)), est.nodes, est.panels)

    # Fall back to the reflected contour, one line integral per node.
    def f(x):
        out = np.empty(np.shape(x))
        for i, xi in enumerate(np.atleast_1d(x)):
            if xi <= 0:
                out[i] = (0.25 ** beta)
                continue
            out[i] = abs(phi_reflected(beta, PolarArgument(float(xi), theta)).value) ** 2
        return out
    return integrate(f, [a, b], tol=tol)


def phi_sq_integral(beta: int, delta: float, a: float = 0.0, b: float = math.inf,
                    tol: float = 1e-8, rtol: float = 1e-9, n_cap: int = PHI_SERIES_CAP,
                    grading: float = 0.9) -> IntegralEstimate:
    """int_a^b |Phi_beta(x e^{i(pi/2-delta)})|^2 dx.

    Three regions: near 0 (below where the series fits in ``n_cap`` terms)
    Phi comes from its residue expansion (closed form for beta = 1); in the
    middle from the exponential series on panels graded geometrically toward
    0 with ratio ``grading``; beyond the point where the series is negligible
    from the closed-form integral of |Psi|^2.
    """
    if not 0.0 < delta < 0.5 * math.pi:
        raise DomainError("delta must lie in (0, pi/2)")
    if not 0.0 <= a < b:
        raise DomainError("need 0 <= a < b")
    theta = 0.5 * math.pi - delta
    rot = complex(math.cos(theta), math.sin(theta))
    x_lo = _series_floor(beta, delta, n_cap)
    x_hi = _series_ceiling(delta, _PHI_TOL)
    total = IntegralEstimate(0.0, 0.0, 0, 0)

    lo, hi = max(a, 0.0), min(b, x_lo)
    if lo < hi:
        total = total + _phi_sq_small_x(beta, delta, lo, hi, 0.1 * tol)

    lo, hi = max(a, x_lo), min(b, x_hi)
    if lo < hi:
        bps = []
        if lo < 1.0:
            k = math.ceil(math.log(lo) / math.log(grading))
            geo = 1.0 * grading ** np.arange(k, -1, -1)
            bps.extend(g for g in geo if lo < g < min(hi, 1.0))
        if hi > 1.0:
            bps.extend(uniform_breakpoints(max(lo, 1.0), hi, 1.0)[1:-1])
            if lo < 1.0:
                bps.append(1.0)
        bps = np.unique(np.concatenate([[lo], np.array(bps, dtype=float), [hi]]))

        def f(x):
            return np.abs(phi_direct_many(beta, x * rot, _PHI_TOL, n_cap)) ** 2

        total = total + integrate(f, bps, tol=0.8 * tol, rtol=rtol)

    lo, hi = max(a, x_hi), b
    if lo < hi:
        val = psi_sq_integral(beta, delta, lo, hi)
        # Neglected cross term 2 |Psi| |series| with |series| <= e^{-x sin delta}-scaled bound.
        err = 2.0 * math.sqrt(max(val, 0.0)) * math.exp(-lo * math.sin(delta)) * 10.0
        total = total + IntegralEstimate(val, err, 0, 0)
    return total


# ---------------------------------------------------------------------------
# reports


def parseval_check(beta: int, delta: float, tol: float = 1e-8, delta_min: float = DELTA_MIN) -> DecompositionReport:
    """Both sides of the Parseval identity, computed independently."""
    _check_delta(delta, delta_min)
    if not delta < 0.5 * math.pi:
        raise DomainError("delta must lie in (0, pi/2)")
    lhs = parseval_lhs(beta, delta, tol)
    rhs = phi_sq_integral(beta, delta, tol=tol)
    return DecompositionReport(beta, delta, parseval_lhs=lhs.value, parseval_rhs=rhs.value,
                               total=rhs.value, total_err=rhs.abs_err, parseval_lhs_err=lhs.abs_err)


def j_decomposition(beta: int, delta: float, tol: float = 1e-8, delta_min: float = DELTA_MIN,
                    with_moment: bool = True) -> DecompositionReport:
    """Split of the Phi-integral at x = delta^{(beta-1)/2} and x = 1, plus the
    |Psi|^2 part on [split, 1], the Parseval left side, and the offset to J_beta(2 delta).
    """
    _check_delta(delta, delta_min)
    split = delta ** (0.5 * (beta - 1))
    j1 = phi_sq_integral(beta, delta, 1.0, math.inf, tol)
    j3 = phi_sq_integral(beta, delta, 0.0, split, tol)
    if split < 1.0:
        j4 = phi_sq_integral(beta, delta, split, 1.0, tol)
        j6 = psi_sq_integral(beta, delta, split, 1.0)
    else:
        j4 = IntegralEstimate(0.0, 0.0, 0, 0)
        j6 = 0.0
    total = phi_sq_integral(beta, delta, tol=tol)
    lhs = parseval_lhs(beta, delta, tol)
    o1 = None
    if with_moment:
        o1 = j_moment(beta, 2.0 * delta, tol=tol, rtol=1e-10, delta_min=delta_min).value - total.value
    return DecompositionReport(
        beta, delta, split_point=split, j1=j1.value, j3=j3.value, j4=j4.value,
        total=total.value, parseval_lhs=lhs.value, parseval_rhs=total.value,
        o1_correction=o1, j6=j6, pieces_err=j1.abs_err + j3.abs_err + j4.abs_err,
        total_err=total.abs_err, parseval_lhs_err=lhs.abs_err,
    )


# ---------------------------------------------------------------------------
# Laplace-to-Cesaro comparison

CATALOG = {
    0: "constant 1",
    1: "identity t",
    2: "|zeta(1/2+it)|^2",
}


def laplace_cesaro_check(sample_id: int, T: float, tol: float = 1e-8) -> float:
    """e * int_0^inf f e^{-t/T} dt - int_0^T f dt for catalog function ``sample_id``.

    Nonnegative for every nonnegative f because e^{-t/T} >= 1/e on [0, T].
    """
    if sample_id not in CATALOG:
        raise DomainError(f"sample_id must be one of {sorted(CATALOG)}")
    if not T > 0:
        raise DomainError("T must be positive")
    if sample_id == 2:
        laplace = j_moment(1, 1.0 / T, tol=tol, rtol=1e-10, delta_min=min(DELTA_MIN, 1.0 / T)).value
        cesaro = m_moment(1, T, tol=tol, rtol=1e-10).value
        return math.e * laplace - cesaro
    k = sample_id
    f = (lambda t: np.ones_like(t)) if k == 0 else (lambda t: t)
    t_cut = T * (math.log(1.0 / tol) + 2.0 * math.log(T + 1.0) + 10.0)
    laplace = integrate(lambda t: f(t) * np.exp(-t / T), uniform_breakpoints(0.0, t_cut, T), tol=tol).value
    cesaro = integrate(f, [0.0, T], tol=tol).value
    return math.e * laplace - cesaro
