"""Exact arithmetic kernel: sieved multiplicative tables, Kloosterman and
Ramanujan sums, the variant sums V_q with their divisor-aggregation identity,
Gauss-sum factorizations, and a prime-sum oracle.

Everything here is exact-combinatorial: complex exponentials are evaluated
only after exact mod-1 argument reduction (see util.e_frac), and all modular
inverses come from a batched product-tree pass so a length-c sum costs O(c)
multiplications plus one modular exponentiation.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .util import e_frac, e_frac_array

_BOUND_CAP = 10**8


class BoundTooLargeError(ValueError):
    def __init__(self, bound: int):
        super().__init__(f"table bound {bound} exceeds cap {_BOUND_CAP}")
        self.bound = bound
        self.cap = _BOUND_CAP


class WeilBoundError(AssertionError):
    """Raised when |S(m,n;c)| exceeds tau(c)*sqrt(gcd(m,n,c))*sqrt(c).

    This cannot happen for a correct evaluator; it signals an arithmetic bug.
    """

    def __init__(self, m: int, n: int, c: int, ratio: float):
        super().__init__(f"Weil bound violated at (m={m}, n={n}, c={c}): ratio {ratio}")
        self.witness = (m, n, c, ratio)


class SumKind(Enum):
    KLOOSTERMAN = "kloosterman"
    RAMANUJAN = "ramanujan"
    VARIANT = "variant"
    GAUSS = "gauss"
    VARIANT_GAUSS = "variant_gauss"


@dataclass(frozen=True)
class ResidueSum:
    value: complex
    modulus: int
    kind: SumKind


@dataclass
class ArithTables:
    """Linear-sieve tables of mu, phi, Lambda, smallest prime factor, tau."""

    bound: int
    mobius: np.ndarray
    totient: np.ndarray
    von_mangoldt: np.ndarray
    spf: np.ndarray
    divisor_count: np.ndarray
    primes: np.ndarray = field(repr=False)

    def verify(self) -> None:
        """Check the three divisor-sum identities over the whole table."""
        n = self.bound
        mob_sum = np.zeros(n + 1, dtype=np.int64)
        phi_sum = np.zeros(n + 1, dtype=np.int64)
        lam_sum = np.zeros(n + 1, dtype=np.float64)
        for d in range(1, n + 1):
            mob_sum[d::d] += self.mobius[d]
            phi_sum[d::d] += self.totient[d]
            lam_sum[d::d] += self.von_mangoldt[d]
        if mob_sum[1] != 1 or np.any(mob_sum[2:] != 0):
            raise AssertionError("sum_{d|n} mu(d) != [n=1]")
        if np.any(phi_sum[1:] != np.arange(1, n + 1)):
            raise AssertionError("sum_{d|n} phi(d) != n")
        logs = np.log(np.arange(1, n + 1, dtype=np.float64))
        rel = np.abs(lam_sum[1:] - logs) / np.maximum(logs, 1.0)
        if np.any(rel > 1e-12):
            raise AssertionError("sum_{d|n} Lambda(d) != log n within 1e-12")


def build_tables(bound: int) -> ArithTables:
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if bound > _BOUND_CAP:
        raise BoundTooLargeError(bound)
    n = bound
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
    primes = np.flatnonzero(spf == np.arange(n + 1))
    primes = primes[primes >= 2]

    mobius = np.ones(n + 1, dtype=np.int64)
    totient = np.arange(n + 1, dtype=np.int64)
    von_mangoldt = np.zeros(n + 1, dtype=np.float64)
    for p in primes:
        p = int(p)
        mobius[p::p] *= -1
        if p * p <= n:
            mobius[p * p :: p * p] = 0
        totient[p::p] = totient[p::p] // p * (p - 1)
        logp = math.log(p)
        q = p
        while q <= n:
            von_mangoldt[q] = logp
            q *= p

    divisor_count = np.ones(n + 1, dtype=np.int64)
    divisor_count[0] = 0
    for d in range(2, n + 1):
        divisor_count[d::d] += 1

    if n >= 1:
        mobius[0] = 0
        totient[0] = 0
    return ArithTables(
        bound=n,
        mobius=mobius,
        totient=totient,
        von_mangoldt=von_mangoldt,
        spf=spf,
        divisor_count=divisor_count,
        primes=primes,
    )


@functools.lru_cache(maxsize=8)
def _cached_tables(bound: int) -> ArithTables:
    return build_tables(bound)


def divisors(n: int) -> list[int]:
    """Sorted divisor list by trial division up to sqrt(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def divisor_tau_nu(n: int, nu: complex) -> complex:
    """tau_nu(n) = sum_{ab=n} (a/b)^nu; real for purely imaginary nu."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0.0 + 0.0j
    for a in divisors(n):
        b = n // a
        total += complex(a / b) ** nu
    return total


def hecke_tau_check(m: int, n: int, nu: complex) -> float:
    """|tau_nu(m)tau_nu(n) - sum_{d | (m,n)} tau_nu(mn/d^2)|."""
    lhs = divisor_tau_nu(m, nu) * divisor_tau_nu(n, nu)
    g = math.gcd(m, n)
    rhs = sum(divisor_tau_nu(m * n // (d * d), nu) for d in divisors(g))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# modular units and batched inverses


@functools.lru_cache(maxsize=4096)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """(units mod c, their inverses) via one product-tree batch inversion."""
    if c == 1:
        return np.array([0], dtype=np.int64), np.array([0], dtype=np.int64)
    alphas = np.arange(c, dtype=np.int64)
    units = alphas[np.gcd(alphas, c) == 1]
    us = [int(a) for a in units]
    prefix = [1]
    for a in us:
        prefix.append(prefix[-1] * a % c)
    inv_all = pow(prefix[-1], -1, c)
    invs = [0] * len(us)
    for i in range(len(us) - 1, -1, -1):
        invs[i] = prefix[i] * inv_all % c
        inv_all = inv_all * us[i] % c
    return units, np.array(invs, dtype=np.int64)


def inverse_table(c: int) -> np.ndarray:
    """Array inv of length c with inv[a] = a^{-1} mod c for units, else -1."""
    units, invs = _units_and_inverses(c)
    table = np.full(c, -1, dtype=np.int64)
    table[units] = invs
    if c == 1:
        table[0] = 0
    return table


# ---------------------------------------------------------------------------
# Kloosterman / Ramanujan sums


def kloosterman(m: int, n: int, c: int) -> float:
    """S(m,n;c) = sum over units alpha of e((alpha*m + inv(alpha)*n)/c).

    The sum is real (alpha <-> -alpha pairing); the imaginary part is
    asserted below 1e-9*c and discarded.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    if c == 1:
        return 1.0
    units, invs = _units_and_inverses(c)
    val = complex(np.sum(e_frac_array(units * (m % c) + invs * (n % c), c)))
    if abs(val.imag) >= 1e-9 * c:
        raise AssertionError(f"S({m},{n};{c}) imaginary part {val.imag} too large")
    return val.real


def kloosterman_row(m: int, c: int) -> np.ndarray:
    """S(m, n; c) for every n mod c at once via one length-c DFT."""
    if c < 1:
        raise ValueError("c must be >= 1")
    if c == 1:
        return np.array([1.0])
    units, invs = _units_and_inverses(c)
    w = np.zeros(c, dtype=np.complex128)
    w[units] = e_frac_array(invs * (m % c), c)
    row = c * np.fft.ifft(w)  # row[n] = sum_beta w[beta] e(beta*n/c)
    return row.real


def ramanujan(m: int, c: int) -> float:
    """R(m;c) = S(m,0;c)."""
    return kloosterman(m, 0, c)


def weil_check(m: int, n: int, c: int, tables: ArithTables | None = None) -> tuple[bool, float]:
    """Assert |S(m,n;c)| <= tau(c) sqrt(gcd(m,n,c)) sqrt(c); return the ratio."""
    if tables is not None and c <= tables.bound:
        tau_c = int(tables.divisor_count[c])
    else:
        tau_c = len(divisors(c))
    s = kloosterman(m, n, c)
    g = math.gcd(math.gcd(abs(m), abs(n)), c)
    if g == 0:
        g = c
    bound = tau_c * math.sqrt(g) * math.sqrt(c)
    ratio = abs(s) / bound
    if ratio > 1.0 + 1e-9:
        raise WeilBoundError(m, n, c, ratio)
    return True, ratio


# ---------------------------------------------------------------------------
# variant sums V_q and the divisor-aggregation identity


@functools.lru_cache(maxsize=4096)
def _variant_support(c: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """(inv(alpha), inv(q - alpha)) over alpha mod c with (alpha(q-alpha), c) = 1."""
    if c == 1:
        return np.array([0], dtype=np.int64), np.array([0], dtype=np.int64)
    inv = inverse_table(c)
    alphas = np.arange(c, dtype=np.int64)
    beta = (q - alphas) % c
    ok = (inv[alphas] >= 0) & (inv[beta] >= 0)
    return inv[alphas[ok]], inv[beta[ok]]


def variant_kloosterman(m: int, n: int, c: int, q: int) -> complex:
    """V_q(m,n;c) = sum over admissible alpha of e((inv(alpha)m + inv(q-alpha)n)/c)."""
    if c < 1 or q < 1:
        raise ValueError("c and q must be >= 1")
    inv_a, inv_b = _variant_support(c, q)
    if len(inv_a) == 0:
        return 0.0 + 0.0j
    return complex(np.sum(e_frac_array(inv_a * (m % c) + inv_b * (n % c), c)))


def variant_block(ms: np.ndarray, ns: np.ndarray, c: int, q: int) -> np.ndarray:
    """Matrix V_q(m,n;c) over m in ms, n in ns, via two phase matrices."""
    inv_a, inv_b = _variant_support(c, q)
    if len(inv_a) == 0:
        return np.zeros((len(ms), len(ns)), dtype=np.complex128)
    ms = np.asarray(ms, dtype=np.int64) % c
    ns = np.asarray(ns, dtype=np.int64) % c
    U = e_frac_array(np.outer(inv_a, ms), c)  # (#alpha, #m)
    W = e_frac_array(np.outer(inv_b, ns), c)  # (#alpha, #n)
    return U.T @ W


def ramanujan_q(n: int, c: int, q: int) -> complex:
    """R_q(n;c) = V_q(0,n;c)."""
    return variant_kloosterman(0, n, c, q)


def luo_identity_check(m: int, n: int, c: int) -> float:
    """|S(m,n;c) e((m+n)/c) - sum_{r q = c} V_q(m,n;r)|."""
    lhs = kloosterman(m, n, c) * e_frac(m + n, c)
    rhs = sum(variant_kloosterman(m, n, r, c // r) for r in divisors(c))
    return abs(lhs - rhs)


def luo_block_defect(m_max: int, n_max: int, c: int) -> float:
    """Max Luo-identity defect over the (m, n) grid at one modulus.

    Block evaluation: one DFT row per m for the twisted Kloosterman side and
    one matrix product per divisor pair for the variant side.
    """
    ms = np.arange(1, m_max + 1)
    ns = np.arange(1, n_max + 1)
    rhs = np.zeros((m_max, n_max), dtype=np.complex128)
    for r in divisors(c):
        rhs += variant_block(ms, ns, r, c // r)
    lhs = np.empty_like(rhs)
    for i, m in enumerate(ms):
        row = kloosterman_row(int(m), c)
        twist = e_frac_array(np.asarray(m + ns), c)
        lhs[i] = row[np.mod(ns, c)] * twist
    return float(np.max(np.abs(lhs - rhs)))


def luo_sweep(m_max: int, n_max: int, c_max: int) -> float:
    """Max Luo-identity defect over all 1<=m<=m_max, 1<=n<=n_max, c<=c_max."""
    return max(luo_block_defect(m_max, n_max, c) for c in range(1, c_max + 1))


# ---------------------------------------------------------------------------
# Gauss sums against Dirichlet characters


class InvalidCharacterError(ValueError):
    pass


def _check_character(char: np.ndarray, c: int, rng_seed: int = 1) -> None:
    if len(char) != c:
        raise InvalidCharacterError(f"character table length {len(char)} != modulus {c}")
    rng = np.random.default_rng(rng_seed)
    a = rng.integers(0, c, size=100)
    b = rng.integers(0, c, size=100)
    lhs = char[(a * b) % c]
    rhs = char[a] * char[b]
    if np.max(np.abs(lhs - rhs)) > 1e-10:
        raise InvalidCharacterError("multiplicativity failed on random pairs")
    units = np.gcd(np.arange(c), c) == 1 if c > 1 else np.array([True])
    if c > 1 and np.max(np.abs(char[~units])) > 1e-12:
        raise InvalidCharacterError("character does not vanish off units")


def gauss_sums(m: int, n: int, c: int, q: int, char: np.ndarray) -> tuple[complex, complex]:
    """(G(m;chi), G_q(n;chi)) with G = sum chi(a)e(am/c) and
    G_q = sum over a with (q-a, c)=1 of chi(a) e(inv(q-a) n / c)."""
    _check_character(char, c)
    if c == 1:
        return complex(char[0]), complex(char[0])
    alphas = np.arange(c, dtype=np.int64)
    G = complex(np.sum(char * e_frac_array(alphas * (m % c), c)))
    inv = inverse_table(c)
    beta = (q - alphas) % c
    ok = inv[beta] >= 0
    Gq = complex(np.sum(char[ok] * e_frac_array(inv[beta[ok]] * (n % c), c)))
    return G, Gq


def character_decomposition_defect(m: int, n: int, c: int, q: int, char: np.ndarray) -> float:
    """|sum_alpha chi(alpha) V_q(alpha*m, n; c) - G(m;chi) G_q(n;chi)|."""
    lhs = 0.0 + 0.0j
    for a in range(c):
        if abs(char[a]) > 1e-15:
            lhs += char[a] * variant_kloosterman(a * m, n, c, q)
    G, Gq = gauss_sums(m, n, c, q, char)
    return abs(lhs - G * Gq)


# ---------------------------------------------------------------------------
# prime sums


@functools.lru_cache(maxsize=4)
def _prime_table(x: int) -> np.ndarray:
    sieve = np.ones(x + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(x**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def primes_up_to(x: float) -> np.ndarray:
    return _prime_table(int(x))


def vq_prime_sum_oracle(m: int, n: int, c: int, q: int, x: float) -> complex:
    """sum over primes p <= x, p not dividing c, of V_q(mp, n; c) log p.

    Direct summation, grouped by the residue class of p mod c so each class
    contributes (theta-restricted log-mass) * V_q(m*a, n; c).
    """
    if x < 2:
        raise ValueError("x must be >= 2")
    ps = primes_up_to(x)
    logs = np.log(ps.astype(np.float64))
    if c == 1:
        return complex(np.sum(logs))
    keep = (c % ps) != 0  # p | c  iff  c mod p == 0
    ps, logs = ps[keep], logs[keep]
    mass = np.bincount(ps % c, weights=logs, minlength=c)
    total = 0.0 + 0.0j
    for a in range(c):
        if mass[a] != 0.0:
            total += mass[a] * variant_kloosterman(m * a, n, c, q)
    return total


def vq_prime_sum_main_term(n: int, c: int, q: int, x: float) -> complex:
    """Main term x * mu(c) * R_q(n;c) / phi(c) of the prime-sum asymptotic
    (for the m=1 twist; R(1;c) = mu(c))."""
    tables = _cached_tables(max(c, 2))
    mu_c = int(tables.mobius[c])
    phi_c = int(tables.totient[c])
    return x * mu_c * ramanujan_q(n, c, q) / phi_c
