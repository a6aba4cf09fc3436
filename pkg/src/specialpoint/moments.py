"""Assembly of the twisted-moment asymptotics.

Diagonal main terms for the first and second moments are reproduced by
direct quadrature of the cutoff-weighted Gaussian averages; the truncated
off-diagonal geometric sums and the Eisenstein contributions are evaluated
head-on at desk scale and compared against their analytic envelopes; the
unsmoothing weight and the unsmoothed closed forms round out the toolkit.

Envelope convention: every big-O is instantiated with epsilon = 0.05 and an
implicit constant of 10 (20 for the Eisenstein terms, whose exponents are
inherited from subconvexity input and are far from tight at these heights).
Envelopes are reported as ratios, never hard-asserted, except where the
acceptance grid pins an explicit tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq
from scipy.special import erf

from . import arith
from .bessel import T_WINDOW_HALF, TestWeight, fast_H
from .specialfn import (
    EULER_GAMMA,
    AfeGrid,
    AfeWeightSpec,
    digamma,
    omega_weight,
    zeta_em,
    zeta_em_grid,
)
from .util import pairwise_sum

_EPS_EXP = 0.05
_ENV_CONST = 10.0
_EIS_CONST = 20.0


# ---------------------------------------------------------------------------
# constants and divisor sums


def gamma_delta(delta: int) -> float:
    """gamma_0 = gamma - log 8 pi^2 - pi/2, gamma_1 = gamma - log 8 pi^2 + pi/2."""
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    sign = -1.0 if delta == 0 else 1.0
    return EULER_GAMMA - math.log(8.0 * math.pi**2) + sign * math.pi / 2.0


def gamma_delta_reassembled(delta: int) -> float:
    """The same constant rebuilt from the digamma route: 2 gamma + psi(kappa)
    - 2 log pi with kappa = (1 + 2 delta)/4."""
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    kappa = (1.0 + 2.0 * delta) / 4.0
    return 2.0 * EULER_GAMMA + float(np.real(digamma(kappa))) - 2.0 * math.log(math.pi)


@dataclass(frozen=True)
class DivisorSums:
    """Sigma = sum_{d|m} 1/d (exact); SigmaBreve = sum_{d|m} (log d)/d, carried
    both as a float and as an exact rational coefficient per prime log."""

    m: int
    sigma: mpq
    sigma_breve: float
    log_coeffs: dict[int, mpq] = field(default_factory=dict)


def divisor_sums(m: int) -> DivisorSums:
    if m < 1:
        raise ValueError("m must be >= 1")
    divs = arith.divisors(m)
    sigma = sum((mpq(1, d) for d in divs), mpq(0))
    coeffs: dict[int, mpq] = {}
    for p, _ in _factorize(m):
        acc = mpq(0)
        for d in divs:
            k = 0
            dd = d
            while dd % p == 0:
                dd //= p
                k += 1
            if k:
                acc += mpq(k, d)
        coeffs[p] = acc
    breve = math.fsum(float(c) * math.log(p) for p, c in coeffs.items())
    return DivisorSums(m=m, sigma=sigma, sigma_breve=breve, log_coeffs=coeffs)


def _factorize(n: int) -> list[tuple[int, int]]:
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
# parameters and result record


@dataclass(frozen=True)
class MomentParams:
    T: float
    Pi: float
    delta: int = 0
    m: int = 1
    m2: int | None = None  # set for the second moment: pair (m, m2)

    def __post_init__(self):
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")
        if self.T < 10:
            raise ValueError("T must be >= 10")
        if not (self.T**0.1 <= self.Pi <= self.T**0.9):
            raise ValueError("Pi must lie in [T^0.1, T^0.9]")
        if self.m < 1 or (self.m2 is not None and self.m2 < 1):
            raise ValueError("twist indices must be >= 1")

    @property
    def X(self) -> float:
        return self.T**0.55


@dataclass(frozen=True)
class MomentValue:
    numeric: float
    main_term: float
    envelope: float
    est_error: float

    @property
    def ratio(self) -> float:
        return self.numeric / self.main_term if self.main_term != 0.0 else math.inf


def _t_quadrature(T: float, Pi: float, extra_freq: float, floor: int = 400):
    """Two Gauss-Legendre levels on the Pi-window around T; extra_freq is the
    non-Gaussian phase speed (e.g. 2 log m for m^{-2it})."""
    lo, hi = T - Pi * T_WINDOW_HALF, T + Pi * T_WINDOW_HALF
    lo = max(lo, 1.0)
    swing = (hi - lo) * extra_freq
    n = int(swing / 2.0) + floor
    grids = []
    for nn in (n, 2 * n):
        x, w = np.polynomial.legendre.leggauss(nn)
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        grids.append((mid + half * x, half * w))
    return grids


# ---------------------------------------------------------------------------
# diagonal terms


def diagonal_first(params: MomentParams) -> MomentValue:
    """Gaussian average of the first-moment cutoff weight at twist m.

    numeric = (2/pi^2 sqrt{m}) Re int V_1(m/X; t) m^{-2it} phi(t) t dt over
    the Pi-window; the main term (2/pi sqrt{pi}) Pi T survives only at m = 1.
    """
    T, Pi, m = params.T, params.Pi, params.m
    if m > T:
        raise ValueError("diagonal_first requires m <= T")
    y = m / params.X
    lm = math.log(m) if m > 1 else 0.0
    spec = AfeWeightSpec(sigma=1, delta=params.delta, U=max(math.log(T), 1.0))
    vals = []
    quad_err = 0.0
    for t, w in _t_quadrature(T, Pi, 2.0 * lm):
        grid = AfeGrid(spec, t, nodes=256)
        V, verr = grid.values(y)
        core = V * np.exp(-2j * t * lm) * np.exp(-((t - T) ** 2) / Pi**2) * t * w
        vals.append((2.0 / math.pi**2 / math.sqrt(m)) * float(np.real(np.sum(core))))
        quad_err = float(np.sum(np.abs(w) * verr * t)) * (2.0 / math.pi**2 / math.sqrt(m))
    main = (2.0 / (math.pi * math.sqrt(math.pi))) * Pi * T if m == 1 else 0.0
    env = _ENV_CONST * T**_EPS_EXP * Pi * (
        (math.sqrt(T) if m == 1 else 0.0) + 1.0 / math.sqrt(m)
    )
    return MomentValue(
        numeric=vals[1],
        main_term=main,
        envelope=env,
        est_error=abs(vals[1] - vals[0]) + quad_err,
    )


def second_moment_main(m1: int, m2: int, T: float, Pi: float, delta: int) -> float:
    """(2 / pi sqrt{pi r}) Pi T ((log(T/r) + gamma_delta) Sigma(m) - 2 SigmaBreve(m))
    with m = (m1, m2) and r = m1 m2 / m^2."""
    g = math.gcd(m1, m2)
    r = m1 * m2 // (g * g)
    ds = divisor_sums(g)
    return (
        (2.0 / (math.pi * math.sqrt(math.pi * r)))
        * Pi
        * T
        * ((math.log(T / r) + gamma_delta(delta)) * float(ds.sigma) - 2.0 * ds.sigma_breve)
    )


def diagonal_second(params: MomentParams) -> MomentValue:
    """Truncated diagonal sum of the second moment.

    numeric = (1/sqrt{r}) sum_{d | gcd} (1/d) sum_{n sqrt{r} <= X} (1/n)
              H_2(d n sqrt{r}) with H_2(x) = (4/pi^2) Re int V_2(x^2; t)
              phi(t) t dt; the V_2 cutoff supplies the log T + gamma_delta
              mass so no closed-form log enters the numeric side.
    """
    m2 = params.m2 if params.m2 is not None else params.m
    m1 = params.m
    T, Pi = params.T, params.Pi
    if m1 * m2 > T:
        raise ValueError("diagonal_second requires m1*m2 <= T")
    g = math.gcd(m1, m2)
    r = m1 * m2 // (g * g)
    sr = math.sqrt(r)
    n_max = int(params.X / sr)
    if n_max < 1:
        raise ValueError("truncation range empty; T too small for this twist")
    spec = AfeWeightSpec(sigma=2, delta=params.delta, U=max(math.log(T), 1.0))
    coef = []
    ys = []
    for d in arith.divisors(g):
        for n in range(1, n_max + 1):
            coef.append(1.0 / (d * n))
            ys.append((d * n * sr) ** 2)
    coef = np.asarray(coef)
    ys = np.asarray(ys)
    vals = []
    quad_err = 0.0
    for t, w in _t_quadrature(T, Pi, 0.0, floor=320):
        grid = AfeGrid(spec, t, nodes=256)
        phi_t_w = np.exp(-((t - T) ** 2) / Pi**2) * t * w
        V, verr = grid.values_batch(ys)
        per_y = np.real(V) @ phi_t_w
        vals.append((4.0 / math.pi**2 / sr) * float(pairwise_sum(list(coef * per_y))))
        quad_err = (4.0 / math.pi**2 / sr) * float(
            np.sum(coef * (verr @ (np.abs(w) * t)))
        )
    main = second_moment_main(m1, m2, T, Pi, params.delta)
    env = _ENV_CONST * T**_EPS_EXP * (
        Pi * math.sqrt(T) + T / sr + Pi**3 / (T * sr)
    )
    return MomentValue(
        numeric=vals[1],
        main_term=main,
        envelope=env,
        est_error=abs(vals[1] - vals[0]) + quad_err,
    )


# ---------------------------------------------------------------------------
# off-diagonal geometric sum (desk scale)


@dataclass(frozen=True)
class OffDiagResult:
    value: complex
    bound_ratio: float
    c_range: tuple[int, int]
    terms: int
    est_error: float


def offdiag_geometric(params: MomentParams, sign: str = "+") -> OffDiagResult:
    """Direct evaluation of the truncated off-diagonal sum at N = T:

    (1/sqrt N) sum_{c <= mN/T} (1/c) sum_{n ~ N} S(m, +-n; c) w(n/N)
               H^{+-}(4 pi sqrt(mn)/c, sqrt(mn)),

    w(x) = bump(x)/sqrt x with a raised-cosine bump on [1, 2].  The bound
    ratio compares |value| against (Pi + m) T^{0.55} with constant 1; it is
    reported, never asserted, since the implicit constant is not effective.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    T, Pi, m = params.T, params.Pi, params.m
    if T > 2000:
        raise ValueError("offdiag_geometric is a desk-scale check: T <= 2000")
    N = int(T)
    # strict c < mN/T: the c-sum is void at m = 1, N = T
    c_max = (m * N - 1) // int(T)
    weight = TestWeight(T=T, Pi=Pi)
    s = +1 if sign == "+" else -1
    total = 0.0 + 0.0j
    est = 0.0
    terms = 0
    for c in range(1, c_max + 1):
        row = arith.kloosterman_row(m, c)
        pieces = []
        for n in range(N + 1, 2 * N):
            u = n / N
            bump = math.cos(math.pi * (u - 1.5)) ** 2 if abs(u - 1.5) < 0.5 else 0.0
            if bump == 0.0:
                continue
            S = float(np.real(row[(s * n) % c]))
            if S == 0.0:
                continue
            x = 4.0 * math.pi * math.sqrt(m * n) / c
            ev = fast_H(weight, sign, x, math.sqrt(m * n))
            pieces.append((S / c) * (bump / math.sqrt(u)) * ev.value)
            est += abs(S / c) * bump * ev.est_error
            terms += 1
        total += pairwise_sum(pieces)
    total /= math.sqrt(N)
    est /= math.sqrt(N)
    bound = (Pi + m) * T**0.55
    return OffDiagResult(
        value=complex(total),
        bound_ratio=abs(total) / bound,
        c_range=(1, c_max),
        terms=terms,
        est_error=est,
    )


# ---------------------------------------------------------------------------
# Eisenstein contributions


@dataclass(frozen=True)
class EisensteinResult:
    value: float
    envelope: float
    est_error: float

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.envelope


def _tau_it(m: int, t: np.ndarray) -> np.ndarray:
    """tau_it(m) = sum_{ab = m} (a/b)^{it}."""
    out = np.zeros_like(t, dtype=np.complex128)
    for a in arith.divisors(m):
        b = m // a
        out += np.exp(1j * t * math.log(a / b))
    return out


def eisenstein_term(
    order: int, m: int | tuple[int, int], T: float, Pi: float
) -> EisensteinResult:
    """Continuous-spectrum contribution to the twisted moments.

    order 1: (2/pi) zeta(1/2) int omega(t) tau_it(m) m^{-it} zeta(1/2+2it) phi(t) dt,
    order 2: the squared analogue with |zeta(1/2+2it)|^2 and the cosine
    correlation factor cos(t log(m1/m2)).  Real parts; t confined to the
    Pi-window.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if T > 5000:
        raise ValueError("eisenstein_term is a desk-scale check: T <= 5000")
    if order == 2:
        m1, m2 = m if isinstance(m, tuple) else (m, m)
    else:
        if isinstance(m, tuple):
            raise ValueError("order 1 takes a single twist index")
        m1, m2 = m, 1
    lo, hi = max(T - Pi * T_WINDOW_HALF, 2.0), T + Pi * T_WINDOW_HALF
    # phase speed: zeta(1/2+2it) oscillates at ~2 log(t/pi), the twists at log m
    freq = 2.0 * math.log(hi / math.pi) + 2.0 * math.log(max(m1 * m2, 2))
    base = int((hi - lo) * freq / (2.0 * math.pi) * 3.5) + 64
    z_half = zeta_em(0.5).real
    vals = []
    for nn in (base, int(1.5 * base)):
        x, w = np.polynomial.legendre.leggauss(nn)
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        t, wt = mid + half * x, half * w
        om = omega_weight(t)
        zt = zeta_em_grid(0.5 + 2j * t)
        phi = np.exp(-((t - T) ** 2) / Pi**2)
        if order == 1:
            integ = om * _tau_it(m1, t) * np.exp(-1j * t * math.log(m1)) * zt * phi
            pref = (2.0 / math.pi) * z_half
        else:
            corr = np.cos(t * math.log(m1 / m2))
            integ = (
                om * _tau_it(m1, t) * _tau_it(m2, t) * corr * np.abs(zt) ** 2 * phi
            )
            pref = (2.0 / math.pi) * z_half**2
        vals.append(pref * float(np.real(np.sum(wt * integ))))
    tau_m = len(arith.divisors(m1)) * (len(arith.divisors(m2)) if order == 2 else 1)
    if order == 1:
        env = _EIS_CONST * T**_EPS_EXP * tau_m * (math.sqrt(Pi) * T ** (1273 / 8106) + Pi)
    else:
        env = _EIS_CONST * T**_EPS_EXP * tau_m * (T ** (1273 / 4053) + Pi)
    return EisensteinResult(value=vals[1], envelope=env, est_error=abs(vals[1] - vals[0]))


# ---------------------------------------------------------------------------
# unsmoothing


def unsmooth_weight(T: float, Pi: float, H: float, t) -> np.ndarray | float:
    """psi(t) = (1/2)[erf((T+H-t)/Pi) - erf((T-H-t)/Pi)]: the average of the
    Gaussian window over centers K in [T-H, T+H]; values in [0, 1]."""
    if not (Pi**1.1 <= H <= T / 3.0):
        raise ValueError("unsmoothing requires Pi^{1.1} <= H <= T/3")
    tt = np.asarray(t, dtype=np.float64)
    out = 0.5 * (erf((T + H - tt) / Pi) - erf((T - H - tt) / Pi))
    return float(out) if out.ndim == 0 else out


def second_moment_antiderivative(K: float, delta: int) -> float:
    """F(K) = (1/pi^2)[K^2 (2 log K - 1)/4 + gamma_delta K^2 / 2]; F' = K(log K + gamma_delta)/pi^2."""
    if K == 0.0:
        return 0.0
    return (K * K * (2.0 * math.log(K) - 1.0) / 4.0 + gamma_delta(delta) * K * K / 2.0) / (
        math.pi**2
    )


def unsmoothed_main_terms(
    kind: str, T: float, H: float | None = None, delta: int = 0
) -> float:
    """Sharp-cutoff main terms.  With H: first = (4/pi^2) H T and second =
    (1/pi^2) int_{T-H}^{T+H} K (log K + gamma_delta) dK (analytic
    antiderivative).  Without H (long interval): T^2/pi^2 and the closed form
    (1/2 pi^2) T^2 log T + ((2 gamma_delta - 1)/4 pi^2) T^2."""
    if kind not in ("first", "second"):
        raise ValueError("kind must be 'first' or 'second'")
    if H is not None and not (1.0 <= H <= T / 3.0):
        raise ValueError("1 <= H <= T/3 required")
    if kind == "first":
        return (4.0 / math.pi**2) * H * T if H is not None else T * T / math.pi**2
    if H is None:
        return second_moment_antiderivative(T, delta)
    return second_moment_antiderivative(T + H, delta) - second_moment_antiderivative(
        T - H, delta
    )
