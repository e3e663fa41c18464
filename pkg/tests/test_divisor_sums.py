import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci_integrate

from oracles import dbeta_multiplicative, dbeta_multiplicative_float, ordered_factorizations
from zml.divisor_sums import (
    MAX_TABLE,
    divisor_table,
    exp_truncation,
    mercator_sum,
    offdiagonal_term,
    sieve_dbeta,
    sigma1,
    sigma2_bound,
    sigma2_exact,
    squared_exp_sum,
)
from zml.errors import CapacityError, DivisorOverflowError, DomainError, ToleranceUnreachableError


def test_examples():
    assert sieve_dbeta(2, 6)[6] == 4
    assert sieve_dbeta(3, 4)[4] == 6
    assert sieve_dbeta(4, 8)[8] == 20


@pytest.mark.parametrize("beta", [1, 2, 3, 4])
def test_brute_force_enumeration(beta):
    table = sieve_dbeta(beta, 200)
    assert [int(table[n]) for n in range(1, 201)] == [ordered_factorizations(n, beta) for n in range(1, 201)]


@pytest.mark.parametrize("beta", [1, 2, 3, 4, 5])
def test_matches_prime_factorization_and_recursion(beta):
    n_max = 10_000
    table = sieve_dbeta(beta, n_max)
    ref = dbeta_multiplicative(beta, n_max)
    assert all(int(table[n]) == ref[n] for n in range(1, n_max + 1))
    if beta > 1:
        prev = sieve_dbeta(beta - 1, n_max)
        for n in range(1, n_max + 1, 97):
            assert int(table[n]) == sum(int(prev[d]) for d in range(1, n + 1) if n % d == 0)


def test_basic_invariants():
    t = sieve_dbeta(3, 1000)
    assert t[1] == 1 and t.values[0] == 0
    assert np.all(sieve_dbeta(1, 500).values[1:] == 1)
    with pytest.raises(ValueError):
        t.values[5] = 0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300), st.integers(1, 4))
def test_multiplicative(m, n, beta):
    if math.gcd(m, n) != 1:
        return
    t = divisor_table(beta, m * n)
    assert int(t[m * n]) == int(t[m]) * int(t[n])


def test_overflow_and_capacity():
    with pytest.raises(DivisorOverflowError):
        sieve_dbeta(2000, 1024)
    with pytest.raises(CapacityError):
        sieve_dbeta(2, MAX_TABLE + 1)
    with pytest.raises(DomainError):
        sieve_dbeta(0, 10)


def test_csv_export():
    lines = sieve_dbeta(3, 5).to_csv().splitlines()
    assert lines[0] == "n,d_beta"
    assert lines[4] == "4,6"
    assert len(lines) == 6


@pytest.mark.parametrize("beta", [1, 2, 3, 4])
def test_dirichlet_series_consistency(beta):
    n_max, s = 100_000, 2.5
    d = sieve_dbeta(beta, n_max).as_float()[1:]
    partial = float(np.sum(d * np.arange(1, n_max + 1, dtype=float) ** -s))
    full = float(mp.zeta(s) ** beta)
    bound = 2 ** beta * n_max ** (1 - s) * math.log(n_max) ** (beta - 1) / (s - 1)
    assert abs(partial - full) <= bound


def test_truncation_rule_bounds_tail():
    for beta, rate in [(2, 0.1), (3, 0.05), (4, 0.3)]:
        n = exp_truncation(beta, rate, 1e-12)
        d = dbeta_multiplicative_float(beta, 8 * n)
        k = np.arange(n + 1, 8 * n + 1)
        assert np.sum(d[n + 1:] * np.exp(-rate * k)) < 1e-12


# ---------------------------------------------------------------------------
# Sigma_1


@pytest.mark.parametrize("delta", [0.05, 0.3, 1.2])
def test_sigma1_beta1_closed_form(delta):
    a = 2 * math.sin(delta)
    assert sigma1(1, delta) == pytest.approx(-math.log(1 - math.exp(-a)) / a, rel=1e-12)


def _sigma1_brute(beta, delta, n_max=1_000_000):
    d = dbeta_multiplicative_float(beta, n_max)[1:]
    k = np.arange(1, n_max + 1, dtype=float)
    a = 2 * math.sin(delta)
    return math.fsum(d * d * np.exp(-a * k) / k) / a


def test_sigma1_beta2_brute_force():
    assert sigma1(2, 0.1) == pytest.approx(_sigma1_brute(2, 0.1), rel=1e-8)


def test_sigma1_halving_matches_brute_force_growth():
    ratio = sigma1(2, 0.05) / sigma1(2, 0.1)
    assert ratio == pytest.approx(_sigma1_brute(2, 0.05) / _sigma1_brute(2, 0.1), rel=1e-8)
    # growth like delta^-1 log^4(1/delta): faster than plain doubling
    assert ratio > 2.0


@pytest.mark.xfail(strict=True, reason="delta^-1 log^4 growth gives ratio ~3.86 at these deltas; see ledger")
def test_sigma1_halving_band():
    assert 1.9 <= sigma1(2, 0.05) / sigma1(2, 0.1) <= 2.4


def test_sigma1_capacity():
    with pytest.raises(ToleranceUnreachableError):
        sigma1(3, 1e-7)
    with pytest.raises(DomainError):
        sigma1(2, 0.0)


# ---------------------------------------------------------------------------
# Sigma_2


def test_offdiagonal_term_against_quadrature():
    delta = math.pi / 6
    c = -1.5 + 1j * math.cos(delta)
    term = complex(offdiagonal_term(2, 1, delta))
    assert term == pytest.approx(-np.exp(c) / c, abs=1e-15)
    re = sci_integrate.quad(lambda x: math.exp(-1.5 * x) * math.cos(math.cos(delta) * x), 1, np.inf, epsabs=1e-13)[0]
    im = sci_integrate.quad(lambda x: math.exp(-1.5 * x) * math.sin(math.cos(delta) * x), 1, np.inf, epsabs=1e-13)[0]
    assert abs(term - complex(re, im)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 500), st.integers(1, 500), st.floats(0.01, 1.5))
def test_offdiagonal_swap_is_conjugate(n, m, delta):
    if n == m:
        return
    assert complex(offdiagonal_term(m, n, delta)) == complex(offdiagonal_term(n, m, delta)).conjugate()


def test_sigma2_exact_small_cases():
    assert sigma2_exact(3, 0.4, 1) == 0
    # by hand for limit = 2
    d2 = 2.0
    val = d2 * (offdiagonal_term(1, 2, 0.4) + offdiagonal_term(2, 1, 0.4))
    assert sigma2_exact(2, 0.4, 2) == pytest.approx(complex(val), abs=1e-15)


def test_sigma2_exact_bounded_by_majorant_pieces():
    beta, delta, limit = 2, 0.2, 2000
    s2 = sigma2_exact(beta, delta, limit)
    assert abs(s2.imag) < 1e-9 * abs(s2)
    k = np.arange(1, 200_001, dtype=float)
    log_factor = math.fsum(np.exp(-k * math.sin(delta) / 2) / k)
    d = dbeta_multiplicative_float(beta, 20_000)[1:]
    n = np.arange(1, 20_001, dtype=float)
    square = math.fsum(d * d * np.exp(-n * math.sin(delta)))
    assert abs(s2) <= log_factor * square / math.cos(delta)


@pytest.mark.parametrize("delta", [0.05, 0.2, 1.0])
def test_mercator(delta):
    r = math.sin(delta) / 2
    assert mercator_sum(r) == pytest.approx(-math.log(1 - math.exp(-r)), abs=1e-12)


def test_sigma2_bound_dominates_exact():
    assert sigma2_bound(2, 0.1) >= abs(sigma2_exact(2, 0.1, 10_000))


def test_sigma2_bound_is_product_of_factors():
    delta = 0.3
    s = math.sin(delta)
    expected = mercator_sum(s / 2) * squared_exp_sum(2, s) / math.cos(delta)
    assert sigma2_bound(2, delta) == pytest.approx(expected, rel=1e-12)


def test_sigma2_bound_trend():
    # delta * majorant / log^{beta^2}(1/delta) should not grow as delta shrinks
    grid = [0.2, 0.1, 0.05, 0.025]
    norm = [sigma2_bound(2, d) * d / math.log(1 / d) ** 4 for d in grid]
    assert max(norm) <= 3 * norm[0]
