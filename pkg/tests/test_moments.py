import math

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from specialpoint import arith, moments


def test_gamma_delta_two_routes_agree():
    for delta in (0, 1):
        assert moments.gamma_delta(delta) == pytest.approx(
            moments.gamma_delta_reassembled(delta), abs=1e-12
        )
    assert moments.gamma_delta(1) - moments.gamma_delta(0) == pytest.approx(
        math.pi, abs=1e-13
    )


@given(st.integers(1, 600))
@settings(max_examples=80, deadline=None)
def test_divisor_sums_against_direct_loop(m):
    ds = moments.divisor_sums(m)
    divs = arith.divisors(m)
    assert ds.sigma == sum((mpq(1, d) for d in divs), mpq(0))
    direct = math.fsum(math.log(d) / d for d in divs)
    assert ds.sigma_breve == pytest.approx(direct, abs=1e-12)
    # the prime-log coefficients reassemble the float value
    rebuilt = math.fsum(float(c) * math.log(p) for p, c in ds.log_coeffs.items())
    assert rebuilt == pytest.approx(direct, abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        moments.MomentParams(T=5.0, Pi=2.0)
    with pytest.raises(ValueError):
        moments.MomentParams(T=1000.0, Pi=1.5)  # below T^0.1
    p = moments.MomentParams(T=1000.0, Pi=60.0)
    assert p.X == pytest.approx(1000.0**0.55)


def test_second_moment_main_symmetric():
    assert moments.second_moment_main(3, 5, 2000.0, 90.0, 0) == pytest.approx(
        moments.second_moment_main(5, 3, 2000.0, 90.0, 0)
    )


def test_diagonal_first_main_term_survives_only_at_1():
    p1 = moments.MomentParams(T=1000.0, Pi=1000.0**0.6, m=1)
    r1 = moments.diagonal_first(p1)
    assert r1.main_term > 0
    assert abs(r1.ratio - 1.0) < 0.1
    p2 = moments.MomentParams(T=1000.0, Pi=1000.0**0.6, m=2)
    r2 = moments.diagonal_first(p2)
    assert r2.main_term == 0.0
    assert abs(r2.numeric) <= r2.envelope


def test_diagonal_second_within_envelope():
    p = moments.MomentParams(T=1000.0, Pi=1000.0**0.6, m=1, m2=2)
    r = moments.diagonal_second(p)
    assert abs(r.numeric - r.main_term) <= r.envelope
    assert r.est_error < abs(r.numeric) * 1e-3


def test_offdiag_empty_at_m1():
    p = moments.MomentParams(T=500.0, Pi=30.0, m=1)
    r = moments.offdiag_geometric(p)
    assert r.value == 0
    assert r.terms == 0
    assert r.c_range == (1, 0)


@pytest.mark.slow
def test_offdiag_sign_symmetry_and_bound():
    p = moments.MomentParams(T=500.0, Pi=30.0, m=3)
    plus = moments.offdiag_geometric(p, "+")
    minus = moments.offdiag_geometric(p, "-")
    for r in (plus, minus):
        # kloosterman rows are real, the weight is real and even in the
        # spectral variable: imaginary mass is numerical noise
        assert abs(r.value.imag) <= 1e-6 * max(abs(r.value), 1.0)
        assert r.bound_ratio < 1.0
    assert plus.terms == minus.terms


def test_eisenstein_second_order_nonnegative():
    r2 = moments.eisenstein_term(2, (1, 1), 500.0, 30.0)
    assert r2.value >= 0.0  # integrand is a weighted |zeta|^2 mass
    assert r2.ratio < 1.0
    r1 = moments.eisenstein_term(1, 1, 500.0, 30.0)
    assert r1.ratio < 1.0


def test_eisenstein_guards():
    with pytest.raises(ValueError):
        moments.eisenstein_term(3, 1, 500.0, 30.0)
    with pytest.raises(ValueError):
        moments.eisenstein_term(1, 1, 6000.0, 30.0)
    with pytest.raises(ValueError):
        moments.eisenstein_term(1, (2, 3), 500.0, 30.0)


def test_unsmooth_weight_profile():
    T, Pi, H = 1e4, 30.0, 1000.0
    assert moments.unsmooth_weight(T, Pi, H, T) == pytest.approx(1.0, abs=1e-12)
    assert moments.unsmooth_weight(T, Pi, H, T + H) == pytest.approx(0.5, abs=1e-12)
    assert moments.unsmooth_weight(T, Pi, H, T - H) == pytest.approx(0.5, abs=1e-12)
    t = np.linspace(T - 2 * H, T + 2 * H, 4001)
    psi = moments.unsmooth_weight(T, Pi, H, t)
    assert np.all(psi >= -1e-15) and np.all(psi <= 1.0 + 1e-15)
    with pytest.raises(ValueError):
        moments.unsmooth_weight(T, Pi, Pi, T)  # H below Pi^{1.1}
    with pytest.raises(ValueError):
        moments.unsmooth_weight(T, Pi, T / 2.0, T)  # H above T/3


def test_unsmooth_weight_mass():
    T, Pi, H = 1e4, 30.0, 1000.0
    t = np.linspace(T - H - 12 * Pi, T + H + 12 * Pi, 40001)
    mass = np.trapezoid(moments.unsmooth_weight(T, Pi, H, t), t)
    assert mass == pytest.approx(2.0 * H, rel=1e-8)


def test_long_interval_closed_forms():
    T = 3000.0
    assert moments.unsmoothed_main_terms("first", T) == pytest.approx(T * T / math.pi**2)
    for delta in (0, 1):
        closed = moments.unsmoothed_main_terms("second", T, delta=delta)
        ref = (
            T * T * math.log(T) / (2.0 * math.pi**2)
            + (2.0 * moments.gamma_delta(delta) - 1.0) * T * T / (4.0 * math.pi**2)
        )
        assert closed == pytest.approx(ref, rel=1e-14)


def test_windowed_second_moment_telescopes():
    # dyadic windows [upper/2, upper] with (T, H) = (3 upper/4, upper/4)
    # telescope down to H >= 1; the antiderivative closes the bottom edge
    top = 4096.0
    for delta in (0, 1):
        total, upper = 0.0, top
        while upper / 4.0 >= 1.0:
            total += moments.unsmoothed_main_terms(
                "second", T=3.0 * upper / 4.0, H=upper / 4.0, delta=delta
            )
            upper /= 2.0
        total += moments.second_moment_antiderivative(upper, delta)
        ref = moments.second_moment_antiderivative(top, delta)
        assert total == pytest.approx(ref, rel=1e-12)


def test_first_moment_windows_telescope_exactly():
    # (4/pi^2) H T is linear in the window, so splitting is exact
    whole = moments.unsmoothed_main_terms("first", 900.0, H=300.0)
    parts = moments.unsmoothed_main_terms("first", 825.0, H=225.0)
    # [525, 1050] accumulates (4/pi^2) * sum H_i T_i over congruent splits
    assert whole == pytest.approx((4.0 / math.pi**2) * 300.0 * 900.0)
    assert parts < whole
