"""The optimal mollifier: coefficient construction, exact identity checks,
quadratic forms, and the non-vanishing proportion closed forms.

The load-bearing algebra (Mobius inversions, the two divisor-sum identities,
M20 * Xi = 1) is carried in exact rationals via gmpy2, with logarithms held
symbolically as prime -> rational coefficient maps, so the checks are equality
tests rather than floating-point comparisons.  Floating-point shadows of the
same tables support the large-M trend experiments (M up to 10^6) where exact
denominators would be astronomically large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from . import arith
from .moments import divisor_sums, gamma_delta
from .util import pairwise_sum

_EXACT_DEFAULT_CAP = 10**4
_EXACT_HARD_CAP = 10**5
_FLOAT_CAP = 10**8
_TRIPLE_SUM_CAP = 2000


class SizeCapError(ValueError):
    pass


@dataclass
class MollifierCoeffs:
    """Optimal-mollifier tables at length M.

    y_h = mu(h)/Xi on squarefree h <= M; x is its Mobius inversion
    x_n = (mu(n) n / Xi) sum_{m <= M squarefree, n | m} 1/m (which forces
    x_1 = 1); ybreve has two equivalent expressions kept for cross-checking.
    Exact fields carry Xi times the quantity so entries stay small rationals.
    """

    M: int
    exact: bool
    Xi: float
    mobius: np.ndarray  # mu(h) for h <= M
    y_arr: np.ndarray  # float y_h
    x_arr: np.ndarray  # float x_n
    Xi_exact: mpq | None = None
    x_scaled: dict[int, mpq] = field(default_factory=dict)  # Xi * x_n, exact mode

    def y(self, h: int):
        """mu(h)/Xi, exact when available."""
        if not 1 <= h <= self.M:
            return mpq(0) if self.exact else 0.0
        if self.exact:
            return mpq(int(self.mobius[h])) / self.Xi_exact
        return float(self.y_arr[h])

    def x(self, n: int):
        if not 1 <= n <= self.M:
            return mpq(0) if self.exact else 0.0
        if self.exact:
            return self.x_scaled.get(n, mpq(0)) / self.Xi_exact
        return float(self.x_arr[n])

    def ybreve_lambda_scaled(self, h: int) -> dict[int, mpq]:
        """Xi * ybreve_h as a prime -> coefficient-of-log-p map, from the
        von Mangoldt convolution: ybreve_h = sum_p Lambda(p) y_{hp}/p
        = -(mu(h)/Xi) sum_{p <= M/h, p coprime to h} (log p)/p."""
        if self.mobius[h] == 0:
            return {}
        muh = int(self.mobius[h])
        out: dict[int, mpq] = {}
        for p in arith.primes_up_to(self.M // h):
            p = int(p)
            if h % p != 0:
                out[p] = mpq(-muh, p)
        return out

    def ybreve_direct_scaled(self, h: int) -> dict[int, mpq]:
        """Xi * ybreve_h from the defining sum sum_n x_{hn} (log n)/n; the
        coefficient of log p is sum_{n: p | n, hn <= M} (Xi x_{hn})/n."""
        out: dict[int, mpq] = {}
        for p in arith.primes_up_to(self.M // h):
            p = int(p)
            acc = mpq(0)
            n = p
            while h * n <= self.M:
                xs = self.x_scaled.get(h * n)
                if xs is not None:
                    acc += xs / n
                n += p
            if acc != 0:
                out[p] = acc
        return out

    def ybreve_float(self, h: int) -> float:
        if self.mobius[h] == 0:
            return 0.0
        muh = float(self.mobius[h])
        s = sum(
            math.log(p) / p
            for p in arith.primes_up_to(self.M // h)
            if h % int(p) != 0
        )
        return -muh * s / self.Xi


def build_mollifier(M: int, exact: bool | None = None) -> MollifierCoeffs:
    if M < 1:
        raise ValueError("M must be >= 1")
    if exact is None:
        exact = M <= _EXACT_DEFAULT_CAP
    if exact and M > _EXACT_HARD_CAP:
        raise SizeCapError("exact-rational mode capped at M = 1e5")
    if M > _FLOAT_CAP:
        raise SizeCapError("floating mode capped at M = 1e8")
    tables = arith.build_tables(M)
    mob = tables.mobius
    sqfree = mob != 0
    h = np.arange(M + 1, dtype=np.float64)
    h[0] = 1.0
    inv = np.where(sqfree, 1.0 / h, 0.0)
    inv[0] = 0.0
    Xi_f = float(np.sum(inv))
    # x_n = (mu(n) n / Xi) sum_{m <= M squarefree, n | m} 1/m
    x_arr = np.zeros(M + 1)
    for n in range(1, M + 1):
        if mob[n] != 0:
            x_arr[n] = mob[n] * n * float(np.sum(inv[n::n])) / Xi_f
    y_arr = np.where(sqfree, mob.astype(np.float64), 0.0) / Xi_f
    coeffs = MollifierCoeffs(
        M=M, exact=exact, Xi=Xi_f, mobius=mob, y_arr=y_arr, x_arr=x_arr
    )
    if exact:
        terms = [mpq(1, int(hh)) for hh in np.flatnonzero(sqfree)]
        coeffs.Xi_exact = pairwise_sum(terms) if terms else mpq(0)
        inv_exact = {}
        for m in range(1, M + 1):
            if mob[m] != 0:
                inv_exact[m] = mpq(1, m)
        for n in range(1, M + 1):
            if mob[n] == 0:
                continue
            s = pairwise_sum([inv_exact[m] for m in range(n, M + 1, n) if mob[m] != 0])
            coeffs.x_scaled[n] = mpq(int(mob[n]) * n) * s
    return coeffs


# ---------------------------------------------------------------------------
# quadratic forms


@dataclass(frozen=True)
class QuadraticForms:
    M20: mpq | float  # sum y_h^2 / h; equals 1/Xi
    M20_breve: float  # sum y_h ybreve_h / h; tends to -1/2
    M20_delta_yform: float  # log T_delta * M20 - 2 M20_breve
    M20_delta_raw: float | None  # coprime triple sum (M <= cap)
    M20_delta_relaxed: float | None  # Mobius-relaxed quadruple sum
    M20_delta_simplified: float | None  # sum_h sum_{n1,n2} x x log(T_delta/n1 n2)


def _m20_breve_float(M: int, mobius: np.ndarray, Xi: float) -> float:
    """-(1/Xi^2) sum_{p <= M} (log p / p) B_p(M/p) with
    B_p(x) = sum_{squarefree h <= x, p coprime to h} 1/h, unfolded through the
    geometric recursion B_p(x) = A(x) - (1/p) B_p(x/p)."""
    inv = np.where(mobius != 0, 1.0, 0.0)
    inv[0] = 0.0
    n = np.arange(len(inv), dtype=np.float64)
    n[0] = 1.0
    A = np.cumsum(inv / n)

    def B_iter(p: int, x: int) -> float:
        total, coef = 0.0, 1.0
        while x >= 1:
            total += coef * A[x]
            coef *= -1.0 / p
            x //= p
        return total

    s = 0.0
    for p in arith.primes_up_to(M):
        p = int(p)
        s += math.log(p) / p * B_iter(p, M // p)
    return -s / (Xi * Xi)


def quadratic_forms(coeffs: MollifierCoeffs, T: float, delta: int) -> QuadraticForms:
    M = coeffs.M
    log_T_delta = math.log(T) + gamma_delta(delta)
    mob = coeffs.mobius
    if coeffs.exact:
        terms = [mpq(1, h) for h in range(1, M + 1) if mob[h] != 0]
        m20 = pairwise_sum(terms) / (coeffs.Xi_exact * coeffs.Xi_exact)
    else:
        m20 = float(np.sum(np.where(mob != 0, 1.0, 0.0)[1:] / np.arange(1, M + 1))) / (
            coeffs.Xi**2
        )
    m20b = _m20_breve_float(M, mob, coeffs.Xi)
    yform = log_T_delta * float(m20) - 2.0 * m20b
    raw = relaxed = simplified = None
    if M <= _TRIPLE_SUM_CAP:
        x = coeffs.x_arr
        sq = [n for n in range(1, M + 1) if mob[n] != 0]
        ds = {m: divisor_sums(m) for m in sq}
        raw = 0.0
        for m in sq:
            sig, sigb = float(ds[m].sigma), ds[m].sigma_breve
            lim = M // m
            for m1 in range(1, lim + 1):
                if x[m1 * m] == 0.0:
                    continue
                for m2 in range(1, lim + 1):
                    if x[m2 * m] == 0.0 or math.gcd(m1, m2) != 1:
                        continue
                    raw += (
                        x[m1 * m]
                        * x[m2 * m]
                        / (m1 * m2 * m)
                        * (sig * (log_T_delta - math.log(m1 * m2)) - 2.0 * sigb)
                    )
        relaxed = 0.0
        for m in sq:
            sig, sigb = float(ds[m].sigma), ds[m].sigma_breve
            for d in range(1, M // m + 1):
                mu_d = mob[d]
                if mu_d == 0:
                    continue
                lim = M // (d * m)
                for n1 in range(1, lim + 1):
                    if x[d * m * n1] == 0.0:
                        continue
                    for n2 in range(1, lim + 1):
                        if x[d * m * n2] == 0.0:
                            continue
                        relaxed += (
                            mu_d
                            * x[d * m * n1]
                            * x[d * m * n2]
                            / (d * d * m * n1 * n2)
                            * (
                                sig * (log_T_delta - math.log(d * d * n1 * n2))
                                - 2.0 * sigb
                            )
                        )
        simplified = 0.0
        for hh in range(1, M + 1):
            lim = M // hh
            for n1 in range(1, lim + 1):
                if x[hh * n1] == 0.0:
                    continue
                for n2 in range(1, lim + 1):
                    if x[hh * n2] == 0.0:
                        continue
                    simplified += (
                        x[hh * n1]
                        * x[hh * n2]
                        / (hh * n1 * n2)
                        * (log_T_delta - math.log(n1 * n2))
                    )
    return QuadraticForms(
        M20=m20,
        M20_breve=m20b,
        M20_delta_yform=yform,
        M20_delta_raw=raw,
        M20_delta_relaxed=relaxed,
        M20_delta_simplified=simplified,
    )


# ---------------------------------------------------------------------------
# combinatorial identities


def combinatorial_identities(h: int) -> tuple[mpq, dict[int, mpq]]:
    """Exact defects of the two divisor-sum identities at h:

    defect1 = sum_{dm = h} mu(d) Sigma(m)/d - 1,
    defect2 = the prime-log coefficient map of
              sum_{dm = h} (mu(d)/d)(Sigma(m) log d + SigmaBreve(m)),
    both of which must vanish identically.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    defect1 = mpq(-1)
    defect2: dict[int, mpq] = {}
    for d in arith.divisors(h):
        m = h // d
        mu_d = _mobius_single(d)
        if mu_d == 0:
            continue
        ds = divisor_sums(m)
        defect1 += mpq(mu_d) * ds.sigma / d
        for p, k in _factor_pairs(d):
            defect2[p] = defect2.get(p, mpq(0)) + mpq(mu_d * k) * ds.sigma / d
        for p, c in ds.log_coeffs.items():
            defect2[p] = defect2.get(p, mpq(0)) + mpq(mu_d) * c / d
    return defect1, {p: c for p, c in defect2.items() if c != 0}


def _mobius_single(n: int) -> int:
    mu = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            mu = -mu
        d += 1
    if n > 1:
        mu = -mu
    return mu


def _factor_pairs(n: int) -> list[tuple[int, int]]:
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


# ---------------------------------------------------------------------------
# proportions and mollified main terms

_REGIMES = ("unconditional_long", "unconditional_short", "rh_long", "rh_short", "rh_small_mu")


def proportion(mu, regime: str):
    """Non-vanishing proportion closed forms; exact when fed rationals."""
    if regime not in _REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if regime == "unconditional_long":
        return mpq(1, 3) if isinstance(mu, (int, mpq)) else 1.0 / 3.0
    if regime == "rh_long":
        return mpq(1, 2) if isinstance(mu, (int, mpq)) else 0.5
    if not 0 < mu <= 1:
        raise ValueError("0 < mu <= 1 required")
    if regime == "unconditional_short":
        cand = (2 * mu + 1) / (2 * mu + 5)
        third = mpq(1, 3) if isinstance(cand, mpq) else 1.0 / 3.0
        return min(third, cand)
    if regime == "rh_short":
        if not mu > mpq(1, 2):
            raise ValueError("rh_short requires 1/2 < mu < 1")
        return mu / (mu + 1)
    # rh_small_mu
    if not mu > mpq(1, 3):
        raise ValueError("rh_small_mu requires 1/3 < mu")
    return (3 * mu - 1) / (3 * mu)


def mollified_moment_main(
    kind: str, T: float, Pi: float, M: float, delta: int = 0
) -> tuple[float, bool]:
    """Main terms Pi T / pi sqrt{pi} (first) and its (1+Delta)/Delta multiple
    (second) with the validity range of the exponents, Pi = T^nu, M = T^Delta.
    A 1e-9 guard band stands in for the strict-inequality epsilon."""
    if kind not in ("M1", "M2"):
        raise ValueError("kind must be 'M1' or 'M2'")
    nu = math.log(Pi) / math.log(T)
    Delta = math.log(M) / math.log(T)
    base = Pi * T / (math.pi * math.sqrt(math.pi))
    if kind == "M1":
        return base, Delta < (2 * nu + 1) / 3 - 1e-9
    valid = Delta < min(0.5, (2 * nu + 1) / 4) - 1e-9
    return base * (1 + Delta) / Delta, valid


# ---------------------------------------------------------------------------
# audit export


def export_coeffs_tsv(coeffs: MollifierCoeffs, path: str) -> None:
    """Tab-separated audit table: h, mu(h), numerator and denominator of y_h."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("h\tmu\ty_numerator\ty_denominator\n")
        for h in range(1, coeffs.M + 1):
            if coeffs.mobius[h] == 0:
                continue
            yh = coeffs.y(h)
            if isinstance(yh, mpq):
                num, den = yh.numerator, yh.denominator
            else:
                frac = yh
                num, den = frac, 1
            fh.write(f"{h}\t{int(coeffs.mobius[h])}\t{num}\t{den}\n")
