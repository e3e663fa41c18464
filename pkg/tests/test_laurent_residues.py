import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import laurent_by_series
from zml.divisor_sums import divisor_table
from zml.errors import BranchError, DomainError, NonConvergenceError
from zml.laurent_residues import (
    LaurentExpansion,
    cached_expansion,
    laurent_extract,
    numeric_residue,
    psi_beta,
    residue_at_zero,
)

EULER_GAMMA = 0.5772156649015329


def test_beta1_residue_one():
    e = laurent_extract(1)
    assert e.principal[0] == pytest.approx(1.0, abs=1e-12)


def test_beta2_against_series_multiplication():
    e = laurent_extract(2)
    lam0, lam1 = laurent_by_series(2)
    assert e.principal[1] == pytest.approx(lam1, abs=1e-9)
    assert e.principal[0] == pytest.approx(lam0, abs=1e-9)
    assert e.principal[0] == pytest.approx(EULER_GAMMA, abs=1e-9)


def test_beta3_against_series_and_two_radii():
    e = laurent_extract(3)
    assert np.allclose(e.principal, laurent_by_series(3), atol=1e-9, rtol=0)
    other = laurent_extract(3, radius=0.2)
    assert np.allclose(e.principal, other.principal, atol=1e-9, rtol=0)
    assert e.principal[2] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("beta", [1, 2, 3, 4, 5])
def test_leading_coefficient_and_realness(beta):
    e = laurent_extract(beta)
    assert e.principal[-1] == pytest.approx(1.0, abs=1e-9)
    assert e.imag_residual <= 1e-10
    a = laurent_extract(beta, radius=0.2)
    b = laurent_extract(beta, radius=0.3)
    assert np.allclose(a.principal, b.principal, atol=1e-9, rtol=0)
    assert np.allclose(a.analytic, b.analytic, atol=1e-9, rtol=0)


def test_analytic_part_beta1():
    # Gamma(s) zeta(s) - 1/(s-1) at s = 1 equals gamma - gamma = 0
    assert laurent_extract(1).analytic[0] == pytest.approx(0.0, abs=1e-12)


def test_extraction_input_checks():
    with pytest.raises(DomainError):
        laurent_extract(0)
    with pytest.raises(DomainError):
        laurent_extract(2, depth=9)
    with pytest.raises(DomainError):
        laurent_extract(2, radius=1.0)
    with pytest.raises(NonConvergenceError):
        laurent_extract(2, nodes=8)


def test_json_roundtrip():
    e = laurent_extract(3)
    d = json.loads(e.to_json())
    assert set(d) == {"beta", "principal", "analytic", "radius"}
    assert LaurentExpansion.from_dict(d) == e


# ---------------------------------------------------------------------------
# Psi


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 50.0), st.floats(-1.5, 1.5))
def test_psi_beta1_is_reciprocal(x, theta):
    z = x * complex(math.cos(theta), math.sin(theta))
    assert psi_beta(1, z) == pytest.approx(1 / z, rel=1e-12)


def test_psi_beta2_at_one():
    assert psi_beta(2, 1.0) == pytest.approx(laurent_extract(2).principal[0], abs=1e-15)
    assert psi_beta(2, 1.0).real == pytest.approx(EULER_GAMMA, abs=1e-9)


@pytest.mark.parametrize("beta", [1, 2, 3, 4])
@pytest.mark.parametrize("x,delta", [(0.3, 0.2), (1.0, 0.5), (4.0, 1.2)])
def test_psi_matches_circle_residue(beta, x, delta):
    z = x * np.exp(1j * (math.pi / 2 - delta))
    assert abs(psi_beta(beta, z) - numeric_residue(beta, z, 1.0)) < 1e-8


def test_psi_branch():
    with pytest.raises(BranchError):
        psi_beta(2, 1j)
    with pytest.raises(BranchError):
        psi_beta(2, -1.0)
    with pytest.raises(BranchError):
        psi_beta(2, 0.0)
    with pytest.raises(DomainError):
        psi_beta(2, 1.0, expansion=cached_expansion(3))


def test_psi_array():
    z = np.array([1.0, 2 + 1j, 0.5 - 0.1j])
    out = psi_beta(3, z)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(psi_beta(3, 2 + 1j), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.floats(1.0, 1e4), st.floats(0.01, 1.5))
def test_psi_modulus_bound(beta, x, delta):
    lam = cached_expansion(beta).principal
    z = x * np.exp(1j * (math.pi / 2 - delta))
    bound = sum(abs(lam[m]) * (math.log(x) + math.pi / 2) ** m / math.factorial(m) for m in range(beta)) / x
    assert abs(psi_beta(beta, z)) <= bound * (1 + 1e-12)


@pytest.mark.parametrize("beta", [2, 3])
def test_series_minus_psi_converges(beta):
    z = 0.8 * np.exp(1j * (math.pi / 2 - 0.4))
    d = divisor_table(beta, 4096).as_float()
    partial = {}
    for n in (256, 512, 1024, 2048):
        k = np.arange(1, n + 1)
        partial[n] = np.sum(d[1 : n + 1] * np.exp(-k * z)) - psi_beta(beta, z)
    diffs = [abs(partial[b] - partial[a]) for a, b in ((256, 512), (512, 1024), (1024, 2048))]
    assert diffs[-1] < 1e-12
    assert diffs[0] >= diffs[-1]


# ---------------------------------------------------------------------------
# residue at zero


@pytest.mark.parametrize("beta", [1, 2, 3, 4, 5])
def test_residue_at_zero_against_circle(beta):
    for z in (1.0, 0.5 * np.exp(1.2j), 3.0 * np.exp(-0.7j)):
        assert abs(numeric_residue(beta, z, 0.0) - residue_at_zero(beta, z)) < 1e-10
    assert residue_at_zero(beta) == (-0.5) ** beta


def test_residue_at_zero_examples():
    assert residue_at_zero(2) == 0.25
    assert residue_at_zero(3) == -0.125
    with pytest.raises(BranchError):
        residue_at_zero(2, -1j)
