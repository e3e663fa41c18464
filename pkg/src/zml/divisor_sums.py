"""Generalized divisor functions d_beta(n) and the weighted sums Sigma_1, Sigma_2.

d_beta(n) counts ordered factorizations n = n_1 n_2 ... n_beta. Tables are
built by beta - 1 Dirichlet convolutions with the constant function 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DivisorOverflowError, DomainError, ToleranceUnreachableError

# Largest table the package will allocate (uint64, so 8 bytes per entry).
MAX_TABLE = 1 << 23
_UINT64_MAX = np.iinfo(np.uint64).max


@dataclass(frozen=True)
class DivisorTable:
    """d_beta(n) for 1 <= n <= limit; ``values[0]`` is an unused zero."""

    beta: int
    limit: int
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[n]

    def as_float(self) -> np.ndarray:
        return self.values.astype(float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "d_beta"])
        for n in range(1, self.limit + 1):
            w.writerow([n, int(self.values[n])])
        return buf.getvalue()


def _convolve_with_one(prev: np.ndarray, limit: int) -> np.ndarray:
    """out[n] = sum over d | n of prev[d], for n <= limit."""
    out = np.zeros_like(prev)
    # Small divisors: one strided slice each.
    k0 = max(1, limit // 64)
    for k in range(1, k0 + 1):
        out[k::k] += prev[k]
    # Large divisors k > k0 have fewer than 64 multiples; sweep by multiplier.
    ks = np.arange(k0 + 1, limit + 1)
    j = 1
    while j * (k0 + 1) <= limit:
        sel = ks[: limit // j - k0]
        out[j * sel] += prev[sel]
        j += 1
    return out


def sieve_dbeta(beta: int, limit: int, max_limit: int = MAX_TABLE) -> DivisorTable:
    """Exact table of d_beta(1..limit).

    Raises:
        DomainError: for beta < 1 or limit < 1.
        CapacityError: for limit beyond ``max_limit``.
        DivisorOverflowError: if a value could exceed 2**64 - 1.
    """
    if beta < 1 or limit < 1:
        raise DomainError("need beta >= 1 and limit >= 1")
    if limit > max_limit:
        raise CapacityError(f"table limit {limit} exceeds capacity {max_limit}")
    vals = np.ones(limit + 1, dtype=np.uint64)
    vals[0] = 0
    tau_max = None
    for _ in range(beta - 1):
        # Each pass multiplies the maximum by at most max_{n<=limit} d_2(n).
        growth = tau_max if tau_max is not None else limit
        if int(vals.max()) * int(growth) > _UINT64_MAX:
            raise DivisorOverflowError(f"d_{beta}(n) may overflow uint64 for n <= {limit}")
        vals = _convolve_with_one(vals, limit)
        if tau_max is None:
            tau_max = int(vals.max())
    vals.setflags(write=False)
    return DivisorTable(beta, limit, vals)


@lru_cache(maxsize=16)
def _cached_table(beta: int, size: int) -> DivisorTable:
    return sieve_dbeta(beta, size, max_limit=max(size, MAX_TABLE))


def divisor_table(beta: int, limit: int) -> DivisorTable:
    """Shared, immutable table covering at least 1..limit.

    Sizes are rounded up to powers of two so repeated requests reuse one table.
    """
    if limit > MAX_TABLE:
        raise CapacityError(f"table limit {limit} exceeds capacity {MAX_TABLE}")
    size = max(1024, 1 << int(math.ceil(math.log2(max(limit, 1)))))
    return _cached_table(beta, min(size, MAX_TABLE))


@lru_cache(maxsize=16)
def _running_max(beta: int, size: int) -> np.ndarray:
    return np.maximum.accumulate(_cached_table(beta, size).as_float())


def running_max(beta: int, limit: int) -> np.ndarray:
    """max_{m <= n} d_beta(m) as floats, for n up to (at least) limit."""
    tab = divisor_table(beta, limit)
    return _running_max(beta, tab.limit)


def exp_truncation(beta: int, rate: float, tol: float, power: int = 1, extra_decay: float = 0.0) -> int:
    """Number of terms N so that sum_{n>N} d^power(n) e^{-rate n} is below tol.

    Uses the cheap bound max d^power * e^{-rate N} / (N rate), with the
    prefix maximum of the sieved table standing in for max d; the resulting
    N is then doubled once as a safety margin.
    """
    if rate <= 0:
        raise DomainError("decay rate must be positive")
    # even with d = 1 the bound at full capacity would miss tol: fail without sieving
    if rate * MAX_TABLE < 700 and math.exp(-rate * MAX_TABLE) / (MAX_TABLE * rate) >= tol:
        raise ToleranceUnreachableError(
            f"tolerance {tol:g} needs more than {MAX_TABLE} terms at decay rate {rate:g}"
        )
    n = 16
    while True:
        if n > MAX_TABLE:
            raise ToleranceUnreachableError(
                f"tolerance {tol:g} needs more than {MAX_TABLE} terms at decay rate {rate:g}"
            )
        dmax = running_max(beta, n)[n] ** power
        bound = dmax * math.exp(-rate * n) / (n * rate) if rate * n < 700 else 0.0
        if bound * (1.0 + extra_decay) < tol:
            break
        n *= 2
    n *= 2
    if n > MAX_TABLE:
        raise ToleranceUnreachableError(
            f"tolerance {tol:g} needs more than {MAX_TABLE} terms at decay rate {rate:g}"
        )
    return n


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 0.5 * math.pi:
        raise DomainError("delta must lie in (0, pi/2)")


def sigma1(beta: int, delta: float, tol: float = 1e-12) -> float:
    """Diagonal sum (1 / (2 sin delta)) * sum_n d_beta(n)^2 e^{-2 n sin delta} / n."""
    _check_delta(delta)
    if tol <= 0:
        raise DomainError("tol must be positive")
    a = 2.0 * math.sin(delta)
    n = exp_truncation(beta, a, tol * a, power=2)
    d = divisor_table(beta, n).as_float()[1 : n + 1]
    k = np.arange(1, n + 1, dtype=float)
    return float(np.sum(d * d * np.exp(-a * k) / k) / a)


def offdiagonal_term(n, m, delta: float):
    """Integral over [1, inf) of exp(-(n+m) x sin delta + i (n-m) x cos delta)."""
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    c = 1j * (n - m) * math.cos(delta) - (n + m) * math.sin(delta)
    return -np.exp(c) / c


def sigma2_exact(beta: int, delta: float, limit: int) -> complex:
    """Off-diagonal double sum over n != m <= limit, using the closed-form x-integral."""
    _check_delta(delta)
    if limit < 1:
        raise DomainError("limit must be >= 1")
    d = divisor_table(beta, limit).as_float()[1 : limit + 1]
    idx = np.arange(1, limit + 1, dtype=float)
    cs, sn = math.cos(delta), math.sin(delta)
    rows = max(1, (1 << 21) // limit)
    total = 0.0 + 0.0j
    for start in range(0, limit, rows):
        nn = idx[start : start + rows]
        c = 1j * (nn[:, None] - idx[None, :]) * cs - (nn[:, None] + idx[None, :]) * sn
        diag = nn[:, None] == idx[None, :]
        c[diag] = -1.0  # placeholder, masked below
        terms = -np.exp(c) / c
        terms[diag] = 0.0
        total += complex((d[start : start + rows, None] * d[None, :] * terms).sum())
    return total


def mercator_sum(rate: float, tol: float = 1e-14) -> float:
    """sum_{k>=1} e^{-rate k} / k summed explicitly until the tail is below tol."""
    if rate <= 0:
        raise DomainError("rate must be positive")
    k_max = int(math.ceil((math.log(1.0 / tol) - math.log(rate)) / rate)) + 1
    k = np.arange(1, max(k_max, 2) + 1, dtype=float)
    return float(np.sum(np.exp(-rate * k) / k))


def squared_exp_sum(beta: int, rate: float, tol: float = 1e-10) -> float:
    """sum_n d_beta(n)^2 e^{-rate n}."""
    n = exp_truncation(beta, rate, tol, power=2)
    d = divisor_table(beta, n).as_float()[1 : n + 1]
    k = np.arange(1, n + 1, dtype=float)
    return float(np.sum(d * d * np.exp(-rate * k)))


def sigma2_bound(beta: int, delta: float, tol: float = 1e-10) -> float:
    """Computable majorant of |Sigma_2|:

    (1/cos delta) * [sum_k e^{-k sin(delta)/2} / k] * [sum_n d_beta(n)^2 e^{-n sin delta}].
    """
    _check_delta(delta)
    s = math.sin(delta)
    return mercator_sum(0.5 * s, tol) * squared_exp_sum(beta, s, tol) / math.cos(delta)
