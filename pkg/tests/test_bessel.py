import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specialpoint import bessel


@pytest.fixture(scope="module")
def weight():
    return bessel.TestWeight(T=500.0, Pi=30.0)


def test_weight_window_and_phi(weight):
    assert weight.phi(weight.T) == pytest.approx(1.0)
    lo, hi = weight.t_window
    assert lo < weight.T < hi
    # mass outside the window is negligible
    assert weight.phi(hi + weight.Pi) < 1e-7


def test_fast_vs_oracle_spot_checks(weight):
    for v, y in ((1000.0, 1.0), (1000.0, 2.0**0.5), (500.0, 0.5)):
        x = 2.0 * v / y
        for sign in ("+", "-"):
            f = bessel.fast_H(weight, sign, x, y)
            o = bessel.oracle_H(weight, sign, x, y)
            tol = 1e-6 * max(abs(f.value), abs(o.value)) + f.est_error + o.est_error
            assert abs(f.value - o.value) <= tol


def test_fast_H_decay_below_window(weight):
    # oscillation parameter v = xy/2 far below 2T: negligible mass
    budget = 1e-8 * weight.Pi * weight.T
    for v in (1.0, 10.0, weight.T / 10.0):
        ev = bessel.fast_H(weight, "+", 2.0 * v, 1.0)
        assert abs(ev.value) <= budget


def test_h2_reduces_to_cosine_pair(weight):
    t = np.array([480.0, 500.0, 515.0])
    y = 1.7
    direct = 2.0 * np.cos(2.0 * t * math.log(y)) * (weight.phi(t) + weight.phi(-t))
    assert np.allclose(weight.h2(t, y), direct, atol=1e-12)


def test_window_predicate():
    assert bessel.window_predicate(500.0, 30.0, 2.0 * 500.0, 1.0)
    assert not bessel.window_predicate(500.0, 30.0, 100.0, 1.0)
    with pytest.raises(ValueError):
        bessel.window_predicate(500.0, 30.0, 1000.0, 40.0)


def test_i_integral_zero_closed_form():
    for T, Pi in ((500.0, 30.0), (200.0, 15.0)):
        num, _ = bessel.I_integral("-+", T, Pi, 0.0, 0.0)
        ref = bessel.i_integral_zero_closed_form(T, Pi)
        # both are exp(-(T/Pi)^2)-level tiny; compare on the Pi*T scale
        assert abs(num - ref) <= 1e-12 * Pi * T


def test_i_integral_derivative_consistency():
    # returned dI/dv matches a centered difference of I
    T, Pi, v, w = 500.0, 30.0, 900.0, 2.0
    _, dval = bessel.I_integral("-+", T, Pi, v, w)
    h = 1e-3
    up, _ = bessel.I_integral("-+", T, Pi, v + h, w)
    dn, _ = bessel.I_integral("-+", T, Pi, v - h, w)
    fd = (up - dn) / (2.0 * h)
    assert abs(dval - fd) <= 1e-5 * max(abs(dval), 1.0)


@given(st.sampled_from(["gaussian", "raised_cosine"]), st.integers(0, 6), st.integers(1, 9))
@settings(max_examples=30, deadline=None)
def test_poisson_summation(kind, alpha, c):
    F = bessel.BumpFunction(kind=kind, width=3.0, center=0.25)
    assert bessel.poisson_verify(F, alpha, c) <= 1e-8


def test_bump_hat_at_zero_is_mass():
    for kind in ("gaussian", "raised_cosine"):
        F = bessel.BumpFunction(kind=kind, width=2.0)
        x = np.linspace(-40, 40, 400001)
        mass = np.trapezoid(F.value(x), x)
        assert complex(F.hat(0.0)).real == pytest.approx(mass, rel=1e-6)


def test_est_error_nonnegative_and_small(weight):
    ev = bessel.fast_H(weight, "+", 2.0 * 1000.0, 1.0)
    assert ev.est_error >= 0.0
    assert ev.est_error < 1e-3 * max(abs(ev.value), 1.0)
