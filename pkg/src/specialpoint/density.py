"""One-level density toolkit over supplied spectral data.

Explicit-formula ingredients only: the archimedean (digamma) integral and
its large-parameter asymptotic, prime sums against stored Hecke eigenvalues,
the Fejer-kernel Fourier pair, the admissible-support laws v(mu), and the
non-vanishing bookkeeping they feed.  Zeros are never computed here; the
density sum consumes synthetic or externally supplied ordinates.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import digamma, roots_legendre

from .arith import primes_up_to
from .util import ordered_map, pairwise_sum

KIM_SARNAK_EXPONENT = 7.0 / 64.0
HECKE_TOL = 1e-8


class DatasetParseError(ValueError):
    """Malformed dataset line; carries 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class DatasetValidationError(ValueError):
    """One or more rows violate an eigenvalue invariant."""

    def __init__(self, failures: list[tuple[int, str]]):
        self.failures = failures
        detail = "; ".join(f"row {r}: {rule}" for r, rule in failures)
        super().__init__(f"rejected {len(failures)} row(s): {detail}")


class MissingEigenvalueError(KeyError):
    """Prime sum requested beyond the stored eigenvalue range."""

    def __init__(self, nu: int, primes: list[int]):
        self.nu = nu
        self.primes = primes
        super().__init__(
            f"missing lambda(p^{nu}) at primes {primes[:10]}"
            + ("..." if len(primes) > 10 else "")
        )


def kim_sarnak_cap(p: int) -> float:
    """Largest |lambda(p)| compatible with the known progress toward Ramanujan."""
    return p**KIM_SARNAK_EXPONENT + p**-KIM_SARNAK_EXPONENT


def kim_sarnak_cap_p2(p: int) -> float:
    # lambda(p^2) = alpha^2 + 1 + beta^2 with alpha*beta = 1, so the middle
    # Satake term contributes a flat 1 on top of the p-power envelope.
    return p ** (2 * KIM_SARNAK_EXPONENT) + 1.0 + p ** (-2 * KIM_SARNAK_EXPONENT)


@dataclass(frozen=True)
class SpectralRow:
    """One form: spectral ordinate, parity, and eigenvalues at small primes."""

    t: float
    delta: int
    lam: Mapping[int, float]        # p -> lambda(p)
    lam2: Mapping[int, float]       # p -> lambda(p^2)
    zeros: tuple[float, ...] = ()

    def violations(self) -> list[str]:
        out = []
        for p, v in self.lam.items():
            if abs(v) > kim_sarnak_cap(p):
                out.append(f"|lambda({p})| = {abs(v):.6g} exceeds bound {kim_sarnak_cap(p):.6g}")
        for p, v in self.lam2.items():
            if abs(v) > kim_sarnak_cap_p2(p):
                out.append(f"|lambda({p}^2)| = {abs(v):.6g} exceeds bound {kim_sarnak_cap_p2(p):.6g}")
        for p in sorted(set(self.lam) & set(self.lam2)):
            defect = self.lam[p] ** 2 - self.lam2[p] - 1.0
            if abs(defect) > HECKE_TOL:
                out.append(f"Hecke relation at p = {p}: lambda(p)^2 - lambda(p^2) - 1 = {defect:.3e}")
        return out


@dataclass
class SpectralDataset:
    rows: list[SpectralRow] = field(default_factory=list)
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class FourierPair:
    """Fejer pair: phi(x) = (sin(pi v x)/(pi v x))^2, hat supported on [-v, v]."""

    v: float

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError("v must be positive")

    def phi(self, x):
        return np.sinc(self.v * np.asarray(x, dtype=float)) ** 2

    def phi_hat(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        return np.where(y < self.v, (1.0 - y / self.v) / self.v, 0.0)


def level_density_D(
    zeros: Sequence[float],
    t_f: float,
    phi: FourierPair | Callable[[float], float],
    T: float,
) -> float:
    """Sum the test function over rescaled low-lying ordinates around t_f."""
    if T < 3:
        raise ValueError("T must be >= 3")
    f = phi.phi if isinstance(phi, FourierPair) else phi
    if len(zeros) == 0:
        return 0.0
    scale = math.log(T) / (2.0 * math.pi)
    vals = np.atleast_1d(f(scale * (np.asarray(zeros, dtype=float) - t_f)))
    return float(pairwise_sum(vals).real)


@dataclass(frozen=True)
class ExplicitH:
    quadrature: float
    asymptotic: float

    @property
    def gap(self) -> float:
        return abs(self.quadrature - self.asymptotic)


def _gamma_r_log_deriv(s: np.ndarray) -> np.ndarray:
    # Gamma_R(s) = pi^{-s/2} Gamma(s/2), so the log-derivative picks up an
    # explicit -log(pi)/2 alongside the digamma.
    return 0.5 * (digamma(s / 2.0) - math.log(math.pi))


def explicit_H(delta: int, t_f: float, pair: FourierPair, T: float) -> ExplicitH:
    """Archimedean side of the explicit formula, quadrature and asymptotic.

    The quadrature evaluates (1/pi) * int phi((log T/2pi) r) * [G(2k + ir)
    + G(2k + 2i t_f + ir)] dr with G the completed-gamma log-derivative and
    k = (1 + 2 delta)/4; the asymptotic is (log(k + i t_f)/log T) * phi_hat(0).
    """
    if T < 10:
        raise ValueError("T must be >= 10")
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    kappa = (1.0 + 2.0 * delta) / 4.0
    logT = math.log(T)

    # Work in the rescaled variable u = (log T / 2 pi) r: the test function
    # oscillates on the unit scale there while the digamma factor stays smooth.
    v = pair.v
    U = max(100.0, 400.0 / (v * v))
    panel = 0.5 / max(v, 1.0)
    n_panels = int(math.ceil(2.0 * U / panel))
    x, w = roots_legendre(16)
    edges = np.linspace(-U, U, n_panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    u = (mids[:, None] + half * x[None, :]).ravel()
    wu = np.broadcast_to(half * w, (n_panels, 16)).ravel()

    r = (2.0 * math.pi / logT) * u
    g = _gamma_r_log_deriv(2.0 * kappa + 1j * r) + _gamma_r_log_deriv(
        2.0 * kappa + 2j * t_f + 1j * r
    )
    integrand = pair.phi(u) * g.real
    quad = (2.0 / logT) * float(pairwise_sum(integrand * wu).real)

    asym = (math.log(abs(kappa + 1j * t_f)) / logT) * float(pair.phi_hat(0.0))
    return ExplicitH(quadrature=quad, asymptotic=asym)


def prime_sum_P(nu: int, row: SpectralRow, pair: FourierPair, T: float) -> float:
    """Prime-power sum 2 sum_p lam(p^nu) cos(nu t log p) log p / (p^{nu/2} log T)
    weighted by phi_hat(nu log p / log T)."""
    if nu not in (1, 2):
        raise ValueError("nu must be 1 or 2")
    logT = math.log(T)
    cap = T ** (pair.v / nu)
    if cap < 2:
        return 0.0
    ps = primes_up_to(cap)
    table = row.lam if nu == 1 else row.lam2
    missing = [int(p) for p in ps if int(p) not in table]
    if missing:
        raise MissingEigenvalueError(nu, missing)
    lam = np.array([table[int(p)] for p in ps], dtype=float)
    logp = np.log(ps.astype(float))
    terms = (
        2.0
        * lam
        * np.cos(nu * row.t * logp)
        * logp
        / (ps.astype(float) ** (nu / 2.0) * logT)
        * pair.phi_hat(nu * logp / logT)
    )
    return float(pairwise_sum(terms).real)


def prime_sum_table(
    dataset: SpectralDataset, pair: FourierPair, T: float, threads: int = 1
) -> list[tuple[float, float, float]]:
    """Per-row (t, P1, P2); rows are independent so they parallelize cleanly."""

    def one(row: SpectralRow) -> tuple[float, float, float]:
        return (row.t, prime_sum_P(1, row, pair, T), prime_sum_P(2, row, pair, T))

    return ordered_map(one, dataset.rows, threads=threads)


@dataclass(frozen=True)
class RhPrimeSum:
    value: float
    ratio_to_loglog: float


def rh_prime_sum_check(t: float, x: float) -> RhPrimeSum:
    """|sum_{p < x} log p / p^{1+it}|, reported against log log t.

    The bound O(log log t) is conditional, so the ratio is recorded rather
    than asserted.
    """
    if not (2 <= x <= 1e7):
        raise ValueError("x out of range [2, 1e7]")
    if not (10 <= t <= 1e6):
        raise ValueError("t out of range [10, 1e6]")
    ps = primes_up_to(x)
    ps = ps[ps < x]
    if len(ps) == 0:
        return RhPrimeSum(0.0, 0.0)
    pf = ps.astype(float)
    logp = np.log(pf)
    terms = logp / pf * np.exp(-1j * t * logp)
    val = abs(pairwise_sum(terms))
    return RhPrimeSum(value=val, ratio_to_loglog=val / math.log(math.log(t)))


def v_law(mu: float, family: str) -> float:
    """Admissible Fourier support as a function of the window exponent mu."""
    if not (0 < mu < 1):
        raise ValueError("mu must lie in (0, 1)")
    if family == "special_point":
        if mu <= 1.0 / 3.0:
            return 1.0
        if mu <= 0.5:
            return 3.0 * mu
        return 1.0 + mu
    if family == "central_value":
        return min(4.0 * mu, 1.0 + mu)
    raise ValueError(f"unknown family {family!r}")


def p0_closed_form(v: float, family: str) -> float:
    """Non-vanishing proportion lower bound as a function of the support v."""
    if family == "special_point":
        return 1.0 - 1.0 / v
    if family == "central_value_even":
        return 1.0 - 1.0 / v + 1.0 / (4.0 * v * v)
    if family == "central_value_odd":
        return 1.0 - 1.0 / (4.0 * v * v)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class NonvanishingBounds:
    v: float
    p0_lower: float
    slack: float
    # (m, largest p_m allowed if the whole first-moment budget sat at order m)
    table: list[tuple[int, float]]


def nonvanishing_bounds(
    mu: float, family: str, order_cap: int = 8, slack: float = 1e-3
) -> NonvanishingBounds:
    """Closed-form non-vanishing proportion plus the order-of-vanishing budget.

    The Fejer pair of support v gives sum_m m * p_m < 1/v + slack, where p_m
    is the density of forms vanishing to order exactly m; the table lists the
    extremal allocation per order.  p0_lower is reported without the slack so
    the v -> 2 closed forms come out exact.
    """
    if order_cap < 1:
        raise ValueError("order_cap must be >= 1")
    base = "special_point" if family == "special_point" else "central_value"
    v = v_law(mu, base)
    p0 = p0_closed_form(v, family)
    budget = 1.0 / v + slack
    table = [(m, budget / m) for m in range(1, order_cap + 1)]
    return NonvanishingBounds(v=v, p0_lower=p0, slack=slack, table=table)


_TOKEN = re.compile(r"\S+")
_PAIR = re.compile(r"^(\d+):([-+0-9.eE]+)$")


def _parse_line(line_no: int, line: str) -> SpectralRow | None:
    body = line.split("#", 1)[0]
    tokens = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]
    if not tokens:
        return None
    if len(tokens) < 2:
        raise DatasetParseError(line_no, tokens[0][0], "expected `t_f delta ...`")
    col, tok = tokens[0]
    try:
        t = float(tok)
    except ValueError:
        raise DatasetParseError(line_no, col, f"bad spectral parameter {tok!r}") from None
    if not t > 0:
        raise DatasetParseError(line_no, col, "spectral parameter must be positive")
    col, tok = tokens[1]
    if tok not in ("0", "1"):
        raise DatasetParseError(line_no, col, f"parity must be 0 or 1, got {tok!r}")
    delta = int(tok)

    lam: dict[int, float] = {}
    lam2: dict[int, float] = {}
    target = lam
    for col, tok in tokens[2:]:
        if tok == "|":
            if target is lam2:
                raise DatasetParseError(line_no, col, "second `|` separator")
            target = lam2
            continue
        m = _PAIR.match(tok)
        if m is None:
            raise DatasetParseError(line_no, col, f"expected p:lambda, got {tok!r}")
        p = int(m.group(1))
        if p < 2 or any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
            raise DatasetParseError(line_no, col, f"{p} is not prime")
        if p in target:
            raise DatasetParseError(line_no, col, f"duplicate prime {p}")
        try:
            target[p] = float(m.group(2))
        except ValueError:
            raise DatasetParseError(line_no, col, f"bad eigenvalue {m.group(2)!r}") from None
    return SpectralRow(t=t, delta=delta, lam=lam, lam2=lam2)


def ingest_dataset(path, strict: bool = True) -> SpectralDataset:
    """Parse and validate a whitespace dataset.

    Format: `t_f delta p:lam ... | p:lam2 ...`, `#` starts a comment.  Parse
    failures are hard errors with (line, column).  Rows failing the
    eigenvalue invariants raise (strict) or are dropped into `rejected`.
    """
    rows: list[SpectralRow] = []
    failures: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            row = _parse_line(line_no, line)
            if row is None:
                continue
            bad = row.violations()
            if bad:
                failures.extend((line_no, rule) for rule in bad)
            else:
                rows.append(row)
    if failures and strict:
        raise DatasetValidationError(failures)
    return SpectralDataset(rows=rows, rejected=failures)


def eisenstein_surrogate(t: float, p_max: float, delta: int = 0) -> SpectralRow:
    """Continuous-spectrum stand-in: lambda(p) = 2 cos(t log p).

    Hecke-consistent by construction and always within the eigenvalue bound,
    so surrogate rows pass ingestion unchanged.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    lam = {}
    lam2 = {}
    for p in primes_up_to(p_max):
        p = int(p)
        c = 2.0 * math.cos(t * math.log(p))
        lam[p] = c
        lam2[p] = c * c - 1.0
    return SpectralRow(t=t, delta=delta, lam=lam, lam2=lam2)


def write_dataset(dataset: SpectralDataset, path) -> None:
    """Inverse of ingest_dataset (comments aside)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in dataset.rows:
            lam = " ".join(f"{p}:{row.lam[p]!r}" for p in sorted(row.lam))
            lam2 = " ".join(f"{p}:{row.lam2[p]!r}" for p in sorted(row.lam2))
            line = f"{row.t!r} {row.delta} {lam}"
            if lam2:
                line += f" | {lam2}"
            fh.write(line + "\n")
