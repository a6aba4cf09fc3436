"""Dirichlet characters mod c as explicit value tables.

Built from the unit-group generator decomposition: (Z/c)* is a product of
cyclic factors, one per odd prime power (primitive root) plus the {-1, 5}
pair for 2^k, k >= 3.  Each character is returned as a length-c complex
array vanishing off units, principal character first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import e_frac


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int, k: int) -> int:
    """Primitive root mod p^k for odd prime p."""
    phi_p = p - 1
    factors = [q for q, _ in factorize(phi_p)]
    g = 2
    while True:
        if all(pow(g, phi_p // q, p) != 1 for q in factors):
            break
        g += 1
    if k == 1:
        return g
    # lift: g works mod p^k unless g^(p-1) == 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _CyclicFactor:
    modulus: int  # the prime power
    gen: int
    order: int


def _unit_group_factors(c: int) -> list[_CyclicFactor]:
    factors: list[_CyclicFactor] = []
    for p, k in factorize(c):
        pk = p**k
        if p == 2:
            if k == 2:
                factors.append(_CyclicFactor(pk, 3, 2))
            elif k >= 3:
                factors.append(_CyclicFactor(pk, pk - 1, 2))  # -1 mod 2^k
                factors.append(_CyclicFactor(pk, 5, 2 ** (k - 2)))
            # k == 1: trivial group
        else:
            g = _primitive_root(p, k)
            factors.append(_CyclicFactor(pk, g, pk // p * (p - 1)))
    return factors


def _discrete_logs(c: int, factors: list[_CyclicFactor]) -> np.ndarray:
    """logs[a, i] = exponent of factor i in the decomposition of unit a.

    Enumerates all exponent tuples once (phi(c) of them), multiplying the
    CRT-embedded generators; -1 marks non-units.
    """
    gens = []
    for f in factors:
        # embed: g at its own prime power, 1 at the others
        g = f.gen
        m_other = c // f.modulus
        if m_other == 1:
            gens.append(g % c)
        else:
            # CRT combine (g mod f.modulus, 1 mod m_other)
            inv = pow(f.modulus % m_other, -1, m_other) if m_other > 1 else 0
            x = (g + f.modulus * ((1 - g) * inv % m_other)) % c
            gens.append(x)
    logs = np.full((c, len(factors)), -1, dtype=np.int64)
    exps = [0] * len(factors)
    a = 1

    def rec(i: int, a: int):
        if i == len(factors):
            logs[a] = exps
            return
        x = a
        for e in range(factors[i].order):
            exps[i] = e
            rec(i + 1, x)
            x = x * gens[i] % c
        exps[i] = 0

    if c == 1:
        return np.zeros((1, 0), dtype=np.int64)
    rec(0, a)
    return logs


def all_characters(c: int) -> list[np.ndarray]:
    """Every Dirichlet character mod c as a value table; principal first."""
    if c < 1:
        raise ValueError("modulus must be >= 1")
    if c == 1:
        return [np.array([1.0 + 0.0j])]
    factors = _unit_group_factors(c)
    logs = _discrete_logs(c, factors)
    units = logs[:, 0] >= 0 if factors else np.gcd(np.arange(c), c) == 1
    tables: list[np.ndarray] = []
    orders = [f.order for f in factors]
    n_chars = math.prod(orders) if orders else 1

    idx = np.flatnonzero(units) if factors else np.flatnonzero(np.gcd(np.arange(c), c) == 1)
    for code in range(n_chars):
        exps = []
        rem = code
        for d in orders:
            exps.append(rem % d)
            rem //= d
        chi = np.zeros(c, dtype=np.complex128)
        for a in idx:
            val = 1.0 + 0.0j
            for i, d in enumerate(orders):
                val *= e_frac(int(exps[i]) * int(logs[a, i]), d)
            chi[a] = val
        tables.append(chi)
    # principal first: code 0 is all-zero exponents already
    return tables


def principal_character(c: int) -> np.ndarray:
    if c == 1:
        return np.array([1.0 + 0.0j])
    chi = np.zeros(c, dtype=np.complex128)
    chi[np.gcd(np.arange(c), c) == 1] = 1.0
    return chi
