import math

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from specialpoint import mollifier


@pytest.fixture(scope="module")
def coeffs_120():
    return mollifier.build_mollifier(120, exact=True)


def test_hand_values_tiny_M():
    c1 = mollifier.build_mollifier(1, exact=True)
    assert c1.Xi_exact == 1
    assert c1.y(1) == 1
    assert c1.x(1) == 1

    c2 = mollifier.build_mollifier(2, exact=True)
    assert c2.Xi_exact == mpq(3, 2)
    assert c2.y(1) == mpq(2, 3)
    assert c2.y(2) == mpq(-2, 3)
    assert c2.x(1) == 1
    # x_2 = (mu(2)*2/Xi) * (1/2) = -2/3
    assert c2.x(2) == mpq(-2, 3)


@given(st.integers(1, 300))
@settings(max_examples=40, deadline=None)
def test_x1_is_one_exactly(M):
    assert mollifier.build_mollifier(M, exact=True).x(1) == 1


def test_float_path_tracks_exact(coeffs_120):
    f = mollifier.build_mollifier(120, exact=False)
    for h in (1, 2, 30, 119):
        assert f.y(h) == pytest.approx(float(coeffs_120.y(h)), abs=1e-12)
        assert f.x(h) == pytest.approx(float(coeffs_120.x(h)), abs=1e-12)


@given(st.integers(1, 60))
@settings(max_examples=30, deadline=None)
def test_ybreve_two_definitions_agree(h):
    coeffs = mollifier.build_mollifier(120, exact=True)
    assert coeffs.ybreve_direct_scaled(h) == coeffs.ybreve_lambda_scaled(h)


def test_ybreve_float_matches_scaled(coeffs_120):
    for h in (1, 3, 10):
        scaled = coeffs_120.ybreve_lambda_scaled(h)
        rebuilt = sum(float(c) * math.log(p) for p, c in scaled.items()) / float(
            coeffs_120.Xi_exact
        )
        assert coeffs_120.ybreve_float(h) == pytest.approx(rebuilt, abs=1e-12)


@given(st.integers(1, 3000))
@settings(max_examples=80, deadline=None)
def test_combinatorial_identities_exact(h):
    d1, d2 = mollifier.combinatorial_identities(h)
    assert d1 == 0
    assert all(v == 0 for v in d2.values())


def test_quadratic_forms_three_routes_agree():
    coeffs = mollifier.build_mollifier(200, exact=True)
    qf = mollifier.quadratic_forms(coeffs, T=1e6, delta=0)
    assert qf.M20 * coeffs.Xi_exact == 1
    for alt in (qf.M20_delta_raw, qf.M20_delta_relaxed, qf.M20_delta_simplified):
        assert alt == pytest.approx(qf.M20_delta_yform, abs=1e-10)


def test_m20_breve_fast_path_vs_brute_force():
    M = 500
    coeffs = mollifier.build_mollifier(M, exact=True)
    qf = mollifier.quadratic_forms(coeffs, T=1e6, delta=0)
    brute = 0.0
    for h in range(1, M + 1):
        if coeffs.mobius[h] != 0:
            brute += float(coeffs.y(h)) * coeffs.ybreve_float(h) / h
    assert qf.M20_breve == pytest.approx(brute, abs=1e-12)


def test_proportions_exact_rationals():
    assert mollifier.proportion(1, "unconditional_long") == mpq(1, 3)
    assert mollifier.proportion(mpq(1), "unconditional_short") == mpq(1, 3)
    assert mollifier.proportion(mpq(1, 4), "unconditional_short") == mpq(3, 11)
    assert mollifier.proportion(1, "rh_long") == mpq(1, 2)
    assert mollifier.proportion(mpq(3, 4), "rh_short") == mpq(3, 7)
    assert mollifier.proportion(mpq(1, 2), "rh_small_mu") == mpq(1, 3)
    with pytest.raises(ValueError):
        mollifier.proportion(mpq(1, 4), "rh_short")
    with pytest.raises(ValueError):
        mollifier.proportion(0.5, "no_such_regime")


def test_mollified_moment_validity_ranges():
    T = 1e6
    Pi = T**0.55
    main1, ok1 = mollifier.mollified_moment_main("M1", T, Pi, M=T**0.3)
    assert ok1
    assert main1 == pytest.approx(Pi * T / (math.pi * math.sqrt(math.pi)))
    _, ok_edge = mollifier.mollified_moment_main("M1", T, Pi, M=T**0.8)
    assert not ok_edge
    main2, ok2 = mollifier.mollified_moment_main("M2", T, Pi, M=T**0.3)
    assert ok2
    assert main2 == pytest.approx(main1 * (1 + 0.3) / 0.3, rel=1e-9)
    _, ok2_edge = mollifier.mollified_moment_main("M2", T, Pi, M=T**0.6)
    assert not ok2_edge


def test_export_tsv_round_trip(tmp_path, coeffs_120):
    path = tmp_path / "coeffs.tsv"
    mollifier.export_coeffs_tsv(coeffs_120, str(path))
    rows = [line.split("\t") for line in path.read_text().strip().splitlines()]
    header, body = rows[0], rows[1:]
    assert header == ["h", "mu", "y_numerator", "y_denominator"]
    # zero coefficients (non-squarefree h) are omitted from the audit table
    assert len(body) == int(np.count_nonzero(coeffs_120.mobius[1:]))
    for h, mu, num, den in body[:10]:
        y = mpq(int(num), int(den))
        assert y == coeffs_120.y(int(h))
        assert int(mu) == int(coeffs_120.mobius[int(h)])


def test_size_caps():
    with pytest.raises(mollifier.SizeCapError):
        mollifier.build_mollifier(200_000, exact=True)
    with pytest.raises(mollifier.SizeCapError):
        mollifier.build_mollifier(200_000_000)
