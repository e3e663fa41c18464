import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dbeta_multiplicative_float
from zml.errors import DomainError, SlowDecayError, ToleranceUnreachableError
from zml.phi_function import (
    ContourSpec,
    PolarArgument,
    _line_integral,
    cahen_mellin_inverse,
    phi_direct,
    phi_halfline,
    phi_reflected,
    phi_small_z_series,
    phi_tsum,
    shifted_cahen_mellin_check,
    t2_majorant,
    t2_terms,
)


def polar(x, delta):
    return PolarArgument.from_delta(x, delta)


def test_polar_argument():
    p = polar(2.0, 0.3)
    assert p.angle == pytest.approx(math.pi / 2 - 0.3)
    assert p.z == pytest.approx(2 * np.exp(1j * (math.pi / 2 - 0.3)))
    assert p.conj().z == pytest.approx(np.conj(p.z))
    assert p.reciprocal_conj().z == pytest.approx(1 / np.conj(p.z))
    with pytest.raises(DomainError):
        PolarArgument(1.0, math.pi / 2)
    with pytest.raises(DomainError):
        PolarArgument(0.0, 0.1)


# ---------------------------------------------------------------------------
# direct series


def test_direct_beta1_closed_form():
    assert phi_direct(1, 1.0) == pytest.approx(1 / (math.e - 1) - 1, abs=1e-13)
    for x in (0.05, 0.7, 4.0):
        assert phi_direct(1, x) == pytest.approx(1 / math.expm1(x) - 1 / x, abs=1e-12)


def test_direct_beta1_near_zero():
    assert abs(phi_direct(1, 1e-3) + 0.5) < 1e-3


def test_direct_against_halfline_beta2():
    z = polar(0.5, 0.3)
    assert abs(phi_direct(2, z) - phi_halfline(2, z).value) < 1e-6


def test_direct_capacity():
    with pytest.raises(ToleranceUnreachableError):
        phi_direct(2, 1e-9)
    with pytest.raises(DomainError):
        phi_direct(2, 1.0, tol=0.0)


def test_small_z_series_beta1_taylor():
    for z in (0.1, 0.3 * np.exp(0.9j)):
        val, last = phi_small_z_series(1, z)
        assert val == pytest.approx(1 / np.expm1(z) - 1 / z, abs=1e-12)


# ---------------------------------------------------------------------------
# half-line integral


def test_halfline_beta1():
    assert phi_halfline(1, 1.0).value == pytest.approx(1 / (math.e - 1) - 1, abs=1e-8)


def test_halfline_conjugation():
    p = polar(0.8, 0.4)
    a = phi_halfline(2, p).value
    b = phi_halfline(2, p.conj()).value
    assert abs(b - np.conj(a)) < 1e-10


def test_halfline_beta2_against_direct():
    p = polar(1.0, 0.5)
    assert abs(phi_halfline(2, p).value - phi_direct(2, p)) < 1e-7


def test_halfline_slow_decay():
    with pytest.raises(SlowDecayError):
        phi_halfline(2, PolarArgument(1.0, math.pi / 2 - 0.005))
    with pytest.raises(DomainError):
        phi_halfline(2, polar(1.0, 0.5), ContourSpec(abscissa=1.2))


@pytest.mark.parametrize("sigma", [0.4, 0.6])
def test_halfline_abscissa_independence(sigma):
    p = polar(0.9, 0.6)
    base = phi_halfline(2, p).value
    moved = phi_halfline(2, p, ContourSpec(abscissa=sigma)).value
    assert abs(base - moved) < 1e-7


def test_halfline_error_estimates_shrink_with_tol():
    p = polar(0.7, 0.5)
    ests = [phi_halfline(2, p, ContourSpec(tol=t)) for t in (1e-6, 1e-8, 1e-10)]
    errs = [e.abs_err for e in ests]
    assert errs[0] > errs[1] > errs[2]
    assert abs(ests[0].value - ests[2].value) <= errs[0] + errs[2]
    assert abs(ests[1].value - ests[2].value) <= errs[1] + errs[2]


# ---------------------------------------------------------------------------
# reflected contour


def test_reflected_identity():
    y, delta = 3.0, 0.4
    w = polar(y, delta).reciprocal_conj()  # 1 / conj(z) with conj(z) = y e^{-i(pi/2 - delta)}
    assert abs(phi_reflected(2, w).value - phi_direct(2, w)) < 1e-6


def test_reflected_includes_residue_at_zero():
    w = polar(1 / 3, 0.4)
    est = phi_reflected(2, w, alpha=0.25)
    line = _line_integral(2, -0.25, w.log, 200.0, 1e-12)
    assert est.value - line.value == pytest.approx(0.25, abs=1e-9)


def test_reflected_alpha_independence():
    w = polar(1 / 3, 0.4)
    a = phi_reflected(2, w, alpha=0.2).value
    b = phi_reflected(2, w, alpha=0.4).value
    assert abs(a - b) < 1e-7


def test_reflected_alpha_range():
    with pytest.raises(DomainError):
        phi_reflected(2, polar(0.5, 0.4), alpha=1.0)


@pytest.mark.parametrize("beta", [2, 3])
def test_three_representations_small_grid(beta):
    for x, delta in [(0.3, 0.2), (1.0, 0.7), (3.0, 1.2)]:
        p = polar(x, delta)
        vals = [phi_direct(beta, p), phi_halfline(beta, p).value, phi_reflected(beta, p).value]
        assert max(abs(a - b) for a in vals for b in vals) < 1e-5


# ---------------------------------------------------------------------------
# Cahen-Mellin


def test_cahen_mellin_plain():
    assert cahen_mellin_inverse(1.0, 1.25).value == pytest.approx(math.exp(-1), abs=1e-9)
    u = 2.0 * np.exp(0.8j)
    assert abs(cahen_mellin_inverse(u, 0.7).value - np.exp(-u)) < 1e-9


@pytest.mark.parametrize("beta,n,y,delta,alpha", [(3, 1, 2.0, 0.5, 0.3), (2, 5, 1.0, 0.3, 0.25), (4, 2, 1.5, 0.6, 0.2)])
def test_shifted_cahen_mellin(beta, n, y, delta, alpha):
    assert shifted_cahen_mellin_check(beta, n, polar(y, delta), alpha) < 1e-6


def test_shifted_cahen_mellin_degenerate_root():
    with pytest.raises(SlowDecayError):
        shifted_cahen_mellin_check(3, 1, polar(2.0, 1e-4), 0.3)
    with pytest.raises(DomainError):
        shifted_cahen_mellin_check(1, 1, polar(2.0, 0.5), 0.3)


# ---------------------------------------------------------------------------
# T1 + T2 + T3


def _smoothed_zeta_power(beta, s, X=1e4):
    """zeta(s)^beta from sum d(n) n^{-s} e^{-n/X} and its Mellin-shift corrections."""
    n_max = int(45 * X)
    d = dbeta_multiplicative_float(beta, n_max)[1:]
    n = np.arange(1, n_max + 1, dtype=float)
    smoothed = math.fsum(d * n ** -s * np.exp(-n / X))
    with mp.workdps(30):
        center, radius, nodes = 1 - s, 0.1, 64
        f = lambda w: mp.gamma(w) * mp.zeta(s + w) ** beta * mp.power(X, w)
        res = mp.fsum(f(center + radius * mp.expjpi(2 * k / nodes)) * radius * mp.expjpi(2 * k / nodes)
                      for k in range(nodes)) / nodes
        tail = mp.fsum((-1) ** k / mp.factorial(k) * mp.zeta(s - k) ** beta * mp.power(X, -k) for k in range(1, 5))
        return smoothed - float(mp.re(res)) - float(tail)


@pytest.mark.parametrize("beta,alpha", [(2, 0.3), (3, 0.5)])
def test_t1_dirichlet_series(beta, alpha):
    y = 2.0
    t = phi_tsum(beta, y, 0.4, alpha)
    assert t.t1 * y ** alpha == pytest.approx(_smoothed_zeta_power(beta, 1 + alpha), rel=1e-8)


def test_t2_first_term_beta2():
    y, delta = 1.1, 0.3
    term = t2_terms(2, y, delta, np.array([1]))[0]
    assert abs(term) == pytest.approx(math.exp(-(2 * math.pi) ** 2 * y * math.sin(delta)), rel=1e-12)
    # the exponent is i (2 pi)^2 n y e^{i delta}
    phase = 1j * (2 * math.pi) ** 2 * y * np.exp(1j * delta)
    assert term == pytest.approx(np.exp(phase), rel=1e-12)


@pytest.mark.parametrize("beta,y,delta", [(2, 2.0, 0.3), (3, 2.0, 0.5), (3, 5.0, 0.1)])
def test_t2_termwise_bound(beta, y, delta):
    q = 1 / (beta - 1)
    e = (beta / 2 - 1) * q
    n_max = 200_000
    d = dbeta_multiplicative_float(beta, n_max)[1:]
    n = np.arange(1, n_max + 1, dtype=float)
    bound = y ** (1 - e) * math.fsum(
        d * n ** (-e) * np.exp(-(2 * math.pi) ** (beta * q) * n ** q * y ** q * math.sin(delta * q)))
    t = phi_tsum(beta, y, delta, 0.25)
    assert abs(t.t2) <= bound * (1 + 1e-12)
    assert t2_majorant(beta, y, delta) == pytest.approx(bound, rel=1e-10)


def test_t3_positive_and_small():
    t = phi_tsum(3, 2.0, 0.5, 0.3)
    assert 0 < t.t3 < abs(t.t2)


def test_tsum_input_checks():
    with pytest.raises(DomainError):
        phi_tsum(2, 0.5, 0.3, 0.3)
    with pytest.raises(DomainError):
        phi_tsum(1, 2.0, 0.3, 0.3)
    with pytest.raises(ToleranceUnreachableError):
        phi_tsum(3, 2.0, 1e-9, 0.3)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.4, 2.5), st.floats(0.3, 1.2))
def test_conjugate_argument_gives_conjugate_value(x, delta):
    p = polar(x, delta)
    a = phi_direct(3, p)
    b = phi_direct(3, p.conj())
    assert abs(b - np.conj(a)) < 1e-12
