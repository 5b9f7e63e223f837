"""Totient sieves and exact checks of the summatory and coprime-counting identities.

Everything here is exact: integer sums stay Python ints, the sum of phi(j)/j
is an exact rational (gmpy2 ``mpq``), and main terms are evaluated with a
50-digit pi in a 60-digit decimal context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd
from typing import Union

import gmpy2
import numpy as np

from .arith import DECIMAL_PREC, PI, distinct_primes, totient

# Multiplier for every O(.) envelope below. A knob, not a theorem.
ENVELOPE_K = 5

# m <= this uses the direct gcd scan in partial_totient, above it inclusion-exclusion
SCAN_LIMIT = 100_000

Exact = Union[int, Fraction, "gmpy2.mpq"]


@dataclass(frozen=True, eq=False)
class TotientTables:
    """Sieved phi(j) and w(j) for 1 <= j <= limit.

    Arrays have length ``limit + 1``; index 0 is a zero placeholder so that
    ``phi[j]`` is phi(j). Cost is 9 bytes per entry (int64 phi, int8 omega),
    so limit = 10**8 needs about 0.9 GB. Both arrays are read-only.
    """

    limit: int
    phi: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.phi.setflags(write=False)
        self.omega.setflags(write=False)

    def phi_values(self) -> list[int]:
        return self.phi[1:].tolist()

    def omega_values(self) -> list[int]:
        return self.omega[1:].tolist()


def build_tables(N: int) -> TotientTables:
    """Sieve phi and the distinct-prime count w up to N (Eratosthenes style)."""
    if N < 1:
        raise ValueError(f"build_tables needs N >= 1, got {N}")
    phi = np.arange(N + 1, dtype=np.int64)
    omega = np.zeros(N + 1, dtype=np.int8)
    for p in range(2, N + 1):
        # untouched entries are exactly the primes
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
            omega[p::p] += 1
    phi[0] = 0
    return TotientTables(N, phi, omega)


def _check_range(tables: TotientTables, N: int) -> None:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > tables.limit:
        raise ValueError(f"N={N} exceeds table limit {tables.limit}")


@dataclass(frozen=True)
class SummatoryResidual:
    label: str
    N: int
    exact_sum: Exact
    main_term: Decimal
    residual: Decimal
    stated_bound: Decimal

    @property
    def within_bound(self) -> bool:
        return abs(self.residual) <= self.stated_bound


def _ln(x: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PREC
        return Decimal(x).ln()


_MAIN_TERMS = {
    # moment -> (numerator coefficient, denominator coefficient) of c * N^(m+2) / pi^2
    0: (3, 1),
    1: (2, 1),
    2: (3, 2),
}


def summatory_phi(tables: TotientTables, N: int, moment: int = 0) -> SummatoryResidual:
    """sum_{j<=N} j**moment * phi(j) against 3N^2/pi^2, 2N^3/pi^2 or 3N^4/(2 pi^2)."""
    if moment not in _MAIN_TERMS:
        raise ValueError(f"moment must be 0, 1 or 2, got {moment}")
    _check_range(tables, N)
    phis = tables.phi[1 : N + 1].tolist()
    if moment == 0:
        exact = sum(phis)
    elif moment == 1:
        exact = sum(j * p for j, p in enumerate(phis, 1))
    else:
        exact = sum(j * j * p for j, p in enumerate(phis, 1))
    a, b = _MAIN_TERMS[moment]
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PREC
        main = Decimal(a) * Decimal(N) ** (moment + 2) / (Decimal(b) * PI * PI)
        residual = Decimal(exact) - main
        bound = ENVELOPE_K * Decimal(N) ** (moment + 1) * _ln(N)
    label = {0: "phi_sum", 1: "j_phi_sum", 2: "j2_phi_sum"}[moment]
    return SummatoryResidual(label, N, exact, main, residual, bound)


def _rational_sum(terms: list) -> "gmpy2.mpq":
    # binary splitting keeps intermediate denominators near the lcm size
    def go(lo, hi):
        if hi - lo == 1:
            return terms[lo]
        mid = (lo + hi) // 2
        return go(lo, mid) + go(mid, hi)

    return go(0, len(terms))


def _mpq_to_decimal(q) -> Decimal:
    scale = gmpy2.mpz(10) ** DECIMAL_PREC
    scaled = (q.numerator * scale) // q.denominator
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PREC + 20
        return Decimal(int(scaled)).scaleb(-DECIMAL_PREC)


def summatory_phi_over_j(tables: TotientTables, N: int) -> SummatoryResidual:
    """Exact rational sum_{j<=N} phi(j)/j against 6N/pi^2 with envelope K*sqrt(N).

    The exact value has a denominator the size of the primorial of N
    (about 1.4 million bits at N = 10**6); it is kept as a gmpy2 ``mpq``.
    """
    _check_range(tables, N)
    phis = tables.phi[1 : N + 1].tolist()
    exact = _rational_sum([gmpy2.mpq(p, j) for j, p in enumerate(phis, 1)])
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PREC
        main = 6 * Decimal(N) / (PI * PI)
        residual = _mpq_to_decimal(exact) - main
        bound = ENVELOPE_K * Decimal(N).sqrt()
    return SummatoryResidual("phi_over_j_sum", N, exact, main, residual, bound)


def _require_n(n: int) -> None:
    if n <= 1:
        raise ValueError(f"n must be > 1, got {n}")


def coprime_sum(n: int, k: int = 1) -> int:
    """Sum of 1 <= s < k*n with gcd(s, n) == 1, checked against k^2 * n * phi(n) / 2."""
    _require_n(n)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    s = np.arange(1, k * n, dtype=np.int64)
    total = int(s[np.gcd(s, n) == 1].sum())
    expected = k * k * n * totient(n) // 2
    if total != expected:
        raise AssertionError(f"coprime sum identity broken at n={n}, k={k}: {total} != {expected}")
    return total


def coprime_count_upto(n: int, k: int = 1) -> int:
    """Count of 1 <= a <= k*n coprime to n, checked against k * phi(n)."""
    _require_n(n)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    a = np.arange(1, k * n + 1, dtype=np.int64)
    count = int(np.count_nonzero(np.gcd(a, n) == 1))
    if count != k * totient(n):
        raise AssertionError(f"coprime count identity broken at n={n}, k={k}")
    return count


def squarefree_divisors(n: int) -> list[tuple[int, int]]:
    """(d, mu(d)) for every squarefree divisor d of n."""
    divs = [(1, 1)]
    for p in distinct_primes(n):
        divs += [(d * p, -mu) for d, mu in divs]
    return divs


def phi_m_scan(m: int, n: int) -> int:
    return sum(1 for a in range(1, m + 1) if gcd(a, n) == 1)


def phi_m_inclusion_exclusion(m: int, n: int) -> int:
    return sum(mu * (m // d) for d, mu in squarefree_divisors(n))


@dataclass(frozen=True)
class PartialTotient:
    m: int
    n: int
    exact: int
    linear_term: Fraction
    deviation: Fraction
    envelope: int

    @property
    def within_envelope(self) -> bool:
        # strict for m <= n; past n the wrap-around can add another envelope
        if self.m <= self.n:
            return abs(self.deviation) < self.envelope
        return abs(self.deviation) <= 2 * self.envelope


def partial_totient(m: int, n: int) -> PartialTotient:
    """phi_m(n) = #{1 <= a <= m : gcd(a, n) = 1} with its deviation from (m/n) phi(n)."""
    _require_n(n)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    exact = phi_m_scan(m, n) if m <= SCAN_LIMIT else phi_m_inclusion_exclusion(m, n)
    linear = Fraction(m * totient(n), n)
    w = len(distinct_primes(n))
    return PartialTotient(m, n, exact, linear, exact - linear, 2 ** (w - 1))


def partial_totient_profile(n: int, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """phi_m(n) for m = 1..m_max by both routes: cumulative gcd scan and inclusion-exclusion."""
    _require_n(n)
    a = np.arange(1, m_max + 1, dtype=np.int64)
    scan = np.cumsum(np.gcd(a, n) == 1, dtype=np.int64)
    ie = np.zeros(m_max, dtype=np.int64)
    for d, mu in squarefree_divisors(n):
        ie += mu * (a // d)
    return scan, ie


def envelope_violations(n_max: int, factor: int = 3) -> list[tuple[int, int, str]]:
    """Scan 2 <= n <= n_max, 1 <= m <= factor*n for route disagreements and envelope breaches.

    Deviations are compared in integers: |n*phi_m - m*phi(n)| against n*2^(w-1).
    """
    bad = []
    for n in range(2, n_max + 1):
        scan, ie = partial_totient_profile(n, factor * n)
        if not np.array_equal(scan, ie):
            m = int(np.argmax(scan != ie)) + 1
            bad.append((n, m, "routes disagree"))
            continue
        phi_n = int(scan[n - 1])
        env = 2 ** (len(distinct_primes(n)) - 1)
        m = np.arange(1, factor * n + 1, dtype=np.int64)
        dev = np.abs(n * scan - m * phi_n)
        inner = dev[:n] >= n * env
        outer = dev[n:] > 2 * n * env
        if inner.any():
            bad.append((n, int(np.argmax(inner)) + 1, "envelope"))
        if outer.any():
            bad.append((n, int(np.argmax(outer)) + n + 1, "envelope"))
    return bad


@dataclass(frozen=True)
class OmegaPowerSum:
    m: int
    weighted: bool
    value: int
    growth_ratio: float | None  # value / (m^(1 or 2) * ln ln m); None when ln ln m <= 0


def sum_two_pow_omega(tables: TotientTables, m: int, weighted: bool = False) -> OmegaPowerSum:
    """sum_{r=2}^m 2^w(r), or r * 2^w(r) when weighted. Growth is only reported."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    _check_range(tables, m)
    pw = [1 << int(w) for w in tables.omega[2 : m + 1].tolist()]
    if weighted:
        value = sum(r * v for r, v in enumerate(pw, 2))
    else:
        value = sum(pw)
    lnln = math.log(math.log(m))
    scale = m * m if weighted else m
    ratio = value / (scale * lnln) if lnln > 0 else None
    return OmegaPowerSum(m, weighted, value, ratio)


def divisor_sum_check(tables: TotientTables) -> bool:
    """sum_{d | j} phi(d) == j for all j <= limit; an oracle independent of the sieve order."""
    N = tables.limit
    acc = np.zeros(N + 1, dtype=np.int64)
    phi = tables.phi
    for d in range(1, N + 1):
        acc[d::d] += phi[d]
    return bool(np.array_equal(acc[1:], np.arange(1, N + 1)))


@dataclass(frozen=True)
class LemmaCheck:
    lemma_id: str
    params: str
    exact_value: str
    main_term: str
    residual: str
    envelope: str
    passed: bool


def _fmt(x) -> str:
    if isinstance(x, Decimal):
        return f"{x:.6f}"
    if isinstance(x, Fraction):
        return f"{float(x):.6f}"
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def lemma_checks(N: int) -> list[LemmaCheck]:
    """All number-theoretic checks at scale N, in a fixed order."""
    tables = build_tables(max(N, 2))
    rows = [
        LemmaCheck(
            "divisor_sum", f"j<={N}", str(N * (N + 1) // 2), str(N * (N + 1) // 2),
            "0", "0", divisor_sum_check(tables),
        )
    ]
    for res in (summatory_phi(tables, N, 0), summatory_phi(tables, N, 1),
                summatory_phi(tables, N, 2), summatory_phi_over_j(tables, N)):
        exact = res.exact_sum
        shown = str(exact) if isinstance(exact, int) else _fmt(_mpq_to_decimal(exact))
        rows.append(LemmaCheck(res.label, f"N={N}", shown, _fmt(res.main_term),
                               _fmt(res.residual), _fmt(res.stated_bound), res.within_bound))
    if N < 2:
        return rows
    n = N
    phi_n = int(tables.phi[n])
    for k in (1, 2, 3):
        try:
            got = coprime_sum(n, k)
            ok = True
        except AssertionError:
            got, ok = -1, False
        rows.append(LemmaCheck("coprime_sum", f"n={n};k={k}", str(got),
                               str(k * k * n * phi_n // 2), "0", "0", ok))
    for k in (1, 2, 3):
        try:
            got = coprime_count_upto(n, k)
            ok = True
        except AssertionError:
            got, ok = -1, False
        rows.append(LemmaCheck("coprime_count", f"n={n};k={k}", str(got), str(k * phi_n), "0", "0", ok))

    scan, ie = partial_totient_profile(n, 3 * n)
    ms = np.arange(1, 3 * n + 1, dtype=np.int64)
    dev = np.abs(n * scan - ms * phi_n)
    for lemma_id, lo, hi in (("partial_phi_low", 1, n), ("partial_phi_high", n + 1, 3 * n)):
        worst = lo + int(np.argmax(dev[lo - 1 : hi]))
        pt = partial_totient(worst, n)
        ok = pt.within_envelope and bool(np.array_equal(scan, ie))
        rows.append(LemmaCheck(lemma_id, f"n={n};m={worst}", str(pt.exact), _fmt(pt.linear_term),
                               _fmt(pt.deviation), str(pt.envelope if worst <= n else 2 * pt.envelope), ok))

    lnln = math.log(math.log(N)) if N > 2 else float("nan")
    for lemma_id, weighted in (("two_pow_omega_sum", False), ("two_pow_omega_weighted", True)):
        res = sum_two_pow_omega(tables, N, weighted)
        scale = N * N if weighted else N
        ref = scale * lnln
        rows.append(LemmaCheck(lemma_id, f"m={N}", str(res.value), _fmt(ref),
                               _fmt(res.value - ref), "inf", True))
    return rows
