import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specialpoint import density


# ---------------------------------------------------------------------------
# Fourier pair


@given(st.floats(0.3, 4.0), st.floats(-50.0, 50.0))
@settings(max_examples=60, deadline=None)
def test_pair_pointwise_invariants(v, x):
    pair = density.FourierPair(v)
    assert pair.phi(0.0) == 1.0
    assert float(pair.phi(x)) >= 0.0
    assert pair.phi_hat(0.0) == pytest.approx(1.0 / v)
    assert float(pair.phi_hat(v + 0.01)) == 0.0
    assert float(pair.phi_hat(-abs(x))) == float(pair.phi_hat(abs(x)))


@pytest.mark.parametrize("v", [1.0, 1.5, 2.0])
def test_pair_transform_recovers_hat(v):
    # direct quadrature of int phi(x) e(-xy) dx against the triangle
    pair = density.FourierPair(v)
    X = 1.0 / (math.pi**2 * v * v * 1e-6)  # 1e-6 tail truncation of |phi|
    X = min(X, 30000.0)
    n = int(X * (v + 2.5) * 8)
    x = np.linspace(-X, X, 2 * n + 1)
    w = np.full_like(x, x[1] - x[0])
    w[0] = w[-1] = 0.5 * (x[1] - x[0])
    phi = pair.phi(x)
    for y in np.arange(-v + 0.1, v - 0.05, 0.2):
        got = float(np.sum(phi * np.cos(2.0 * math.pi * x * y) * w))
        assert abs(got - float(pair.phi_hat(y))) < 1e-4


# ---------------------------------------------------------------------------
# density sum and the explicit-formula sides


def test_level_density_basics():
    pair = density.FourierPair(2.0)
    assert density.level_density_D([], 10.0, pair, 1e4) == 0.0
    assert density.level_density_D([10.0], 10.0, pair, 1e4) == pytest.approx(1.0)


def test_level_density_riemann_sum():
    # zeros equispaced at gap 2 pi / log T turn the sum into a Riemann sum
    # of int phi = phi_hat(0)
    T = 1e4
    pair = density.FourierPair(1.0)
    gap = 2.0 * math.pi / math.log(T)
    t_f = 50.0
    zeros = t_f + gap * np.arange(-500, 501)
    total = density.level_density_D(list(zeros), t_f, pair, T)
    # unit spacing in the rescaled variable: the sum approximates
    # int phi = phi_hat(0) = 1 (and the hat has no aliases at v = 1)
    assert total == pytest.approx(float(pair.phi_hat(0.0)), rel=0.01)


def test_explicit_H_gap_budget():
    pair = density.FourierPair(2.0)
    for T in (1e3, 1e4):
        h = density.explicit_H(0, T, pair, T)
        assert h.gap <= 5.0 / math.log(T)


def test_explicit_H_phi_hat_scaling():
    # doubling v halves the asymptotic term
    a = density.explicit_H(0, 1e4, density.FourierPair(1.0), 1e4).asymptotic
    b = density.explicit_H(0, 1e4, density.FourierPair(2.0), 1e4).asymptotic
    assert a == pytest.approx(2.0 * b, rel=1e-12)


def test_parity_shift_second_term_decays():
    # the t-dependent digamma difference psi(s + 1/2) - psi(s) ~ 1/(2s)
    from scipy.special import digamma

    for t in (1e2, 1e3, 1e4):
        s = 0.25 + 1j * t
        diff = abs(digamma(s + 0.5) - digamma(s))
        assert diff <= 1.0 / t


# ---------------------------------------------------------------------------
# prime sums


def test_prime_sum_surrogate_against_direct_loop():
    T = 500.0
    pair = density.FourierPair(1.5)
    row = density.eisenstein_surrogate(7.0, T**pair.v + 1)
    got = density.prime_sum_P(1, row, pair, T)
    logT = math.log(T)
    ref = 0.0
    for p in density.primes_up_to(T**pair.v):
        p = int(p)
        lp = math.log(p)
        ref += (
            2.0
            * (2.0 * math.cos(7.0 * lp))
            * math.cos(7.0 * lp)
            * lp
            / (math.sqrt(p) * logT)
            * float(pair.phi_hat(lp / logT))
        )
    assert got == pytest.approx(ref, abs=1e-12)


def test_prime_sum_trivial_cases():
    pair = density.FourierPair(0.5)
    row = density.SpectralRow(t=5.0, delta=0, lam={}, lam2={})
    # T^v < 2: empty sum
    assert density.prime_sum_P(1, row, pair, 3.0) == 0.0
    zero_row = density.SpectralRow(
        t=5.0, delta=0, lam={2: 0.0, 3: 0.0, 5: 0.0, 7: 0.0, 11: 0.0, 13: 0.0},
        lam2={},
    )
    assert density.prime_sum_P(1, zero_row, pair, 200.0) == 0.0


def test_prime_sum_missing_eigenvalues():
    pair = density.FourierPair(1.0)
    row = density.SpectralRow(t=5.0, delta=0, lam={2: 1.0}, lam2={})
    with pytest.raises(density.MissingEigenvalueError) as exc:
        density.prime_sum_P(1, row, pair, 100.0)
    assert 3 in exc.value.primes


def test_rh_prime_sum_check():
    out = density.rh_prime_sum_check(1e3, 2.5)
    assert out.value == pytest.approx(math.log(2.0) / 2.0, abs=1e-14)
    big = density.rh_prime_sum_check(1e3, 1e5)
    assert big.ratio_to_loglog == pytest.approx(big.value / math.log(math.log(1e3)))
    with pytest.raises(ValueError):
        density.rh_prime_sum_check(5.0, 100.0)


# ---------------------------------------------------------------------------
# v-laws and bounds


@given(st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_v_law_bounded_by_two(mu):
    for fam in ("special_point", "central_value"):
        assert 0.0 < density.v_law(mu, fam) < 2.0


def test_v_law_values_and_continuity():
    assert density.v_law(0.5, "special_point") == 1.5
    assert density.v_law(1.0 / 3.0, "central_value") == pytest.approx(4.0 / 3.0)
    for fam, breaks in (
        ("special_point", (1.0 / 3.0, 0.5)),
        ("central_value", (1.0 / 3.0,)),
    ):
        for b in breaks:
            lo = density.v_law(b - 1e-10, fam)
            hi = density.v_law(b + 1e-10, fam)
            assert abs(lo - hi) < 1e-8


def test_nonvanishing_closed_forms():
    assert density.p0_closed_form(2.0, "special_point") == 0.5
    assert density.p0_closed_form(2.0, "central_value_even") == 9.0 / 16.0
    assert density.p0_closed_form(2.0, "central_value_odd") == 15.0 / 16.0


def test_nonvanishing_table_budget():
    nb = density.nonvanishing_bounds(0.5, "special_point", order_cap=5, slack=1e-3)
    assert nb.v == 1.5
    assert nb.p0_lower == pytest.approx(1.0 - 1.0 / 1.5)
    assert [m for m, _ in nb.table] == [1, 2, 3, 4, 5]
    budget = 1.0 / nb.v + nb.slack
    for m, pm in nb.table:
        assert pm == pytest.approx(budget / m)


# ---------------------------------------------------------------------------
# dataset plumbing


def test_ingest_round_trip(tmp_path):
    row = density.eisenstein_surrogate(4.5, 60.0, delta=1)
    path = tmp_path / "ds.txt"
    density.write_dataset(density.SpectralDataset(rows=[row]), path)
    back = density.ingest_dataset(path)
    assert len(back) == 1
    assert back.rows[0].t == row.t
    assert back.rows[0].delta == 1
    assert back.rows[0].lam == dict(row.lam)
    assert back.rows[0].lam2 == dict(row.lam2)


def test_ingest_empty_and_comments(tmp_path):
    path = tmp_path / "ds.txt"
    path.write_text("# only a comment\n\n   \n")
    assert len(density.ingest_dataset(path)) == 0


def test_ingest_parse_errors_carry_positions(tmp_path):
    path = tmp_path / "ds.txt"
    path.write_text("5.0 0 2:1.0\n6.0 2 3:1.0\n")
    with pytest.raises(density.DatasetParseError) as exc:
        density.ingest_dataset(path)
    assert exc.value.line == 2
    assert exc.value.column == 5

    path.write_text("5.0 0 4:1.0\n")
    with pytest.raises(density.DatasetParseError):
        density.ingest_dataset(path)  # 4 is not prime

    path.write_text("5.0 0 2:1.0 | 2:0.5 | 2:0.5\n")
    with pytest.raises(density.DatasetParseError):
        density.ingest_dataset(path)  # duplicated separator


def test_ingest_rejects_bound_violation(tmp_path):
    path = tmp_path / "ds.txt"
    path.write_text("5.0 0 2:3.0\n")
    with pytest.raises(density.DatasetValidationError) as exc:
        density.ingest_dataset(path)
    assert exc.value.failures[0][0] == 1
    lenient = density.ingest_dataset(path, strict=False)
    assert len(lenient) == 0
    assert lenient.rejected


def test_ingest_rejects_hecke_violation(tmp_path):
    path = tmp_path / "ds.txt"
    path.write_text("5.0 1 2:1.0 | 2:0.5\n")  # 1.0^2 != 0.5 + 1
    with pytest.raises(density.DatasetValidationError):
        density.ingest_dataset(path)


@given(st.floats(1.0, 40.0))
@settings(max_examples=20, deadline=None)
def test_surrogate_rows_always_valid(t):
    row = density.eisenstein_surrogate(t, 200.0)
    assert row.violations() == []
