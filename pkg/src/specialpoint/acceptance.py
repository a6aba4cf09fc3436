"""Desk-scale acceptance suite.

Each criterion is a self-contained check with a headline measurement and a
budget; the CLI `acceptance` subcommand and the test gate both run these and
report one line per criterion.  Thread counts only ever feed
:func:`specialpoint.util.ordered_map`, whose reductions are order-fixed, so
the emitted CSV is byte-identical across pools.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from . import arith, bessel, density, mollifier, moments, specialfn
from .characters import all_characters
from .util import ordered_map, rows_to_csv

EULER_GAMMA = 0.57721566490153286


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    measured: float
    budget: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"[{tag}] criterion {self.index:2d} {self.name}: "
            f"measured {self.measured:.6g} vs budget {self.budget:.6g}"
            + (f" ({self.detail})" if self.detail else "")
        )


def criterion_1_luo(threads: int = 1) -> CriterionResult:
    """Variant-sum divisor aggregation reconstructs the twisted sum."""
    worst = arith.luo_sweep(m_max=20, n_max=20, c_max=300)
    return CriterionResult(1, "luo_identity", worst <= 1e-7, worst, 1e-7)


def criterion_2_ramanujan(threads: int = 1) -> CriterionResult:
    tables = arith.build_tables(10_000)

    def block(cs: range) -> float:
        return max(
            abs(arith.kloosterman(1, 0, c) - int(tables.mobius[c])) for c in cs
        )

    blocks = [range(a, min(a + 500, 10_001)) for a in range(1, 10_001, 500)]
    worst = max(ordered_map(block, blocks, threads=threads))
    return CriterionResult(2, "ramanujan_specialization", worst <= 1e-9, worst, 1e-9)


def criterion_3_weil(threads: int = 1) -> CriterionResult:
    tables = arith.build_tables(500)
    mn = np.arange(1, 51)

    def worst_for_c(c: int) -> float:
        tau_c = int(tables.divisor_count[c])
        g = np.gcd.outer(mn, np.gcd(mn, c))  # gcd(m, n, c)
        bound = tau_c * np.sqrt(g.astype(float)) * math.sqrt(c)
        rows = np.stack([arith.kloosterman_row(m, c) for m in mn])
        vals = np.abs(rows[:, mn % c])
        return float(np.max(vals / bound))

    worst = max(ordered_map(worst_for_c, range(1, 501), threads=threads))
    return CriterionResult(3, "weil_bound", worst <= 1.0 + 1e-12, worst, 1.0)


def criterion_4_characters(threads: int = 1) -> CriterionResult:
    def worst_for_c(c: int) -> float:
        out = 0.0
        chars = all_characters(c)
        for q in (1, 2, 3):
            for char in chars:
                for m, n in ((1, 1), (1, -1)):
                    out = max(
                        out, arith.character_decomposition_defect(m, n, c, q, char)
                    )
        return out

    worst = max(ordered_map(worst_for_c, range(1, 61), threads=threads))
    return CriterionResult(4, "character_decomposition", worst <= 1e-9, worst, 1e-9)


def criterion_5_digamma() -> CriterionResult:
    psi_q = float(np.real(specialfn.digamma(0.25)))
    psi_3q = float(np.real(specialfn.digamma(0.75)))
    ref_q = -EULER_GAMMA - 3.0 * math.log(2.0) - math.pi / 2.0
    ref_3q = -EULER_GAMMA - 3.0 * math.log(2.0) + math.pi / 2.0
    gap = abs(moments.gamma_delta(1) - moments.gamma_delta(0)) - math.pi
    worst = max(abs(psi_q - ref_q), abs(psi_3q - ref_3q), abs(gap))
    return CriterionResult(5, "gauss_digamma", worst <= 1e-12, worst, 1e-12)


_BESSEL_V = (50.0, 500.0, 1000.0, 2000.0, 3000.0)
_BESSEL_Y = (0.5, 2.0**-0.5, 1.0, 2.0**0.5, 2.0)


def criterion_6_bessel(threads: int = 1) -> CriterionResult:
    weight = bessel.TestWeight(T=500.0, Pi=30.0)

    def gap(point: tuple[float, float]) -> float:
        v, y = point
        x = 2.0 * v / y
        f = bessel.fast_H(weight, "+", x, y)
        o = bessel.oracle_H(weight, "+", x, y)
        scale = max(abs(f.value), abs(o.value))
        return abs(f.value - o.value) - (1e-6 * scale + f.est_error + o.est_error)

    grid = [(v, y) for v in _BESSEL_V for y in _BESSEL_Y]
    worst = max(ordered_map(gap, grid, threads=threads))

    decay_weight = bessel.TestWeight(T=2000.0, Pi=100.0)
    decay_budget = 1e-8 * decay_weight.Pi * decay_weight.T
    decay = 0.0
    for u in (1.0, 5.0, 20.0, 100.0, 200.0):
        for y in (1.0, 2.0**0.5):
            for sign in ("+", "-"):
                decay = max(
                    decay, abs(bessel.fast_H(decay_weight, sign, 2.0 * u / y, y).value)
                )
    ok = worst <= 0.0 and decay <= decay_budget
    return CriterionResult(
        6, "bessel_fast_vs_oracle", ok, worst, 0.0, detail=f"decay {decay:.3g} vs {decay_budget:.3g}"
    )


def criterion_7_diag_first(threads: int = 1) -> CriterionResult:
    def gap(T: float) -> float:
        p = moments.MomentParams(T=T, Pi=T**0.6, m=1)
        r = moments.diagonal_first(p)
        return abs(r.numeric / r.main_term - 1.0)

    gaps = ordered_map(gap, [1e3, 3e3, 1e4], threads=threads)
    T = 1e4
    budget = 5.0 * T**-0.5 * math.log(T)
    decreasing = gaps[0] > gaps[1] > gaps[2]
    return CriterionResult(
        7,
        "diagonal_first_moment",
        gaps[2] <= budget and decreasing,
        gaps[2],
        budget,
        detail="trend " + "/".join(f"{g:.4f}" for g in gaps),
    )


def criterion_8_diag_second(threads: int = 1) -> CriterionResult:
    T = 1e4

    def gap(delta: int) -> float:
        p = moments.MomentParams(T=T, Pi=T**0.6, delta=delta, m=1, m2=1)
        r = moments.diagonal_second(p)
        return abs(r.numeric / r.main_term - 1.0)

    gaps = ordered_map(gap, [0, 1], threads=threads)
    budget = 10.0 / math.log(T)
    worst = max(gaps)
    return CriterionResult(8, "diagonal_second_moment", worst <= budget, worst, budget)


def criterion_9_mollifier(threads: int = 1) -> CriterionResult:
    exact_ok = True
    for M in (100, 1_000, 10_000):
        coeffs = mollifier.build_mollifier(M, exact=True)
        qf = mollifier.quadratic_forms(coeffs, T=1e6, delta=0)
        exact_ok &= coeffs.x(1) == 1 and qf.M20 * coeffs.Xi_exact == 1

    def block(hs: range) -> bool:
        for h in hs:
            d1, d2 = mollifier.combinatorial_identities(h)
            if d1 != 0 or any(v != 0 for v in d2.values()):
                return False
        return True

    blocks = [range(a, min(a + 1000, 10_001)) for a in range(1, 10_001, 1000)]
    ident_ok = all(ordered_map(block, blocks, threads=threads))

    breves = []
    for M in (10**3, 10**4, 10**5, 10**6):
        coeffs = mollifier.build_mollifier(M, exact=False)
        breves.append(mollifier.quadratic_forms(coeffs, T=1e6, delta=0).M20_breve)
    diffs = [abs(b + 0.5) for b in breves]
    trend_ok = all(a > b for a, b in zip(diffs, diffs[1:]))
    ok = exact_ok and ident_ok and trend_ok
    return CriterionResult(
        9,
        "mollifier_identities",
        ok,
        diffs[-1],
        diffs[0],
        detail=(
            f"exact {exact_ok}, identities {ident_ok}, "
            "|M20_breve + 1/2| trend " + "/".join(f"{d:.4f}" for d in diffs)
        ),
    )


def criterion_10_proportions() -> CriterionResult:
    ok = mollifier.proportion(1, "unconditional_long") == mpq(1, 3)
    ok &= mollifier.proportion(mpq(1), "unconditional_short") == mpq(1, 3)
    ok &= (2 * mpq(1) + 1) / (2 * mpq(1) + 5) == mpq(3, 7)
    ok &= mollifier.proportion(1, "rh_long") == mpq(1, 2)
    ok &= mollifier.proportion(mpq(1, 2) + mpq(1, 10**9), "rh_short") > mpq(1, 3)
    ok &= mpq(1, 2) / (mpq(1, 2) + 1) == mpq(1, 3)
    ok &= (3 * mpq(1, 2) - 1) / (3 * mpq(1, 2)) == mpq(1, 3)
    return CriterionResult(10, "proportion_formulas", bool(ok), 0.0 if ok else 1.0, 0.0)


def criterion_11_v_laws() -> CriterionResult:
    ok = density.v_law(0.5, "special_point") == 1.5
    ok &= abs(density.v_law(1.0 / 3.0, "central_value") - 4.0 / 3.0) < 1e-15
    ok &= Fraction(density.p0_closed_form(2.0, "special_point")) == Fraction(1, 2)
    ok &= Fraction(density.p0_closed_form(2.0, "central_value_even")) == Fraction(9, 16)
    ok &= Fraction(density.p0_closed_form(2.0, "central_value_odd")) == Fraction(15, 16)
    return CriterionResult(11, "v_laws_and_limits", bool(ok), 0.0 if ok else 1.0, 0.0)


def criterion_12_explicit_formula(threads: int = 1) -> CriterionResult:
    pair = density.FourierPair(2.0)

    def rel_gap(T: float) -> float:
        return density.explicit_H(0, T, pair, T).gap * math.log(T)

    gaps = ordered_map(rel_gap, [1e3, 1e4], threads=threads)
    worst = max(gaps)  # scaled so the budget is the constant 5
    return CriterionResult(12, "explicit_formula_gamma_side", worst <= 5.0, worst, 5.0)


def criterion_13_vq_main_term(threads: int = 1) -> CriterionResult:
    x, q = 1e6, 1
    tables = arith.build_tables(30)
    cs = [
        c
        for c in range(1, 31)
        if tables.mobius[c] != 0
        and abs(arith.vq_prime_sum_main_term(1, c, q, x)) > 1e-9
    ]

    def gap(c: int) -> float:
        main = arith.vq_prime_sum_main_term(1, c, q, x)
        ratio = arith.vq_prime_sum_oracle(1, 1, c, q, x) / main
        return abs(ratio - 1.0)

    worst = max(ordered_map(gap, cs, threads=threads))
    return CriterionResult(
        13, "vq_prime_sum_main_term", worst <= 0.1, worst, 0.1, detail=f"{len(cs)} moduli"
    )


def criterion_14_unsmoothing() -> CriterionResult:
    T, Pi, H = 1e4, 30.0, 1000.0
    t = np.linspace(T - H - 12 * Pi, T + H + 12 * Pi, 20001)
    psi = moments.unsmooth_weight(T, Pi, H, t)
    range_ok = float(np.min(psi)) >= -1e-15 and float(np.max(psi)) <= 1.0 + 1e-15
    mass = float(np.trapezoid(psi, t))
    mass_gap = abs(mass / (2.0 * H) - 1.0)

    # Telescoping dyadic windows [upper/2, upper] down to H >= 1, closed off
    # by the antiderivative at the bottom edge.
    top = 4096.0
    total = 0.0
    upper = top
    while upper / 4.0 >= 1.0:
        total += moments.unsmoothed_main_terms(
            "second", T=3.0 * upper / 4.0, H=upper / 4.0, delta=0
        )
        upper /= 2.0
    total += moments.second_moment_antiderivative(upper, 0)
    tele_gap = abs(total / moments.second_moment_antiderivative(top, 0) - 1.0)
    ok = range_ok and mass_gap <= 1e-8 and tele_gap <= 1e-10
    return CriterionResult(
        14,
        "unsmoothing_weight",
        ok,
        max(mass_gap, tele_gap),
        1e-8,
        detail=f"mass gap {mass_gap:.2e}, telescoping gap {tele_gap:.2e}",
    )


def determinism_probe_rows(threads: int) -> list[dict]:
    """Representative threaded sweep rendered through the CSV emitter."""
    rows = []
    defects = ordered_map(
        lambda c: arith.luo_identity_check(3, 2, c), range(1, 121), threads=threads
    )
    for c, d in zip(range(1, 121), defects):
        rows.append({"kind": "luo", "c": c, "value": float(d)})
    weight = bessel.TestWeight(T=500.0, Pi=30.0)
    vals = ordered_map(
        lambda y: bessel.fast_H(weight, "+", 2.0 * 1000.0 / y, y).value,
        _BESSEL_Y,
        threads=threads,
    )
    for y, v in zip(_BESSEL_Y, vals):
        rows.append({"kind": "bessel", "c": 0, "value": float(v.real)})
    return rows


def criterion_15_determinism() -> CriterionResult:
    one = rows_to_csv(determinism_probe_rows(threads=1))
    eight = rows_to_csv(determinism_probe_rows(threads=8))
    ok = one.encode() == eight.encode()
    return CriterionResult(15, "csv_determinism", ok, 0.0 if ok else 1.0, 0.0)


def run_all(threads: int = 1) -> list[CriterionResult]:
    return [
        criterion_1_luo(threads),
        criterion_2_ramanujan(threads),
        criterion_3_weil(threads),
        criterion_4_characters(threads),
        criterion_5_digamma(),
        criterion_6_bessel(threads),
        criterion_7_diag_first(threads),
        criterion_8_diag_second(threads),
        criterion_9_mollifier(threads),
        criterion_10_proportions(),
        criterion_11_v_laws(),
        criterion_12_explicit_formula(threads),
        criterion_13_vq_main_term(threads),
        criterion_14_unsmoothing(),
        criterion_15_determinism(),
    ]


def report_rows(results: list[CriterionResult]) -> list[dict]:
    return [
        {
            "criterion": r.index,
            "name": r.name,
            "passed": r.passed,
            "measured": r.measured,
            "budget": r.budget,
            "detail": r.detail,
        }
        for r in results
    ]
