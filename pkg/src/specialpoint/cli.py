"""Batch driver: per-module sweeps, report emission, and the acceptance suite.

Reports are CSV-first (header comment lines, `.` decimal point, 17
significant digits) with a JSON mirror written alongside.  Wall-clock goes
to stderr only, so identical configs produce byte-identical reports
regardless of thread count.

Exit codes: 0 ok, 1 hard assertion failed, 2 bad config, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, acceptance, arith, bessel, density, mollifier, moments
from .util import default_threads, ordered_map, rows_to_csv

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_COMPUTATION = 3


class ConfigError(ValueError):
    pass


# flag name -> caster, shared by the CLI and the config-file loader
_CASTS = {
    "T": float,
    "Pi": float,
    "M": int,
    "mu": float,
    "m": int,
    "m1": int,
    "m2": int,
    "delta": int,
    "dataset": str,
    "out": str,
    "format": str,
    "threads": int,
    "seed": int,
    "c_max": int,
    "m_max": int,
    "n_max": int,
}


def _load_config(path: str) -> dict:
    """Flat `key = value` text; `#` comments; unknown keys are config errors."""
    out = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected `key = value`")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CASTS:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](val.strip())
        except ValueError:
            raise ConfigError(f"{path}:{line_no}: bad value for {key!r}") from None
    return out


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """Config file fills unset flags; built-in defaults fill the rest."""
    cfg = _load_config(args.config) if args.config else {}
    params = {}
    for key in _CASTS:
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
        elif key in cfg:
            params[key] = cfg[key]
        elif key in defaults:
            params[key] = defaults[key]
    if params.get("format") not in (None, "csv", "json"):
        raise ConfigError(f"format must be csv or json, got {params['format']!r}")
    return params


def _emit(rows: list[dict], params: dict, subcommand: str) -> None:
    header = [
        f"# specialpoint {__version__}",
        # threads and output paths are execution details, not result-defining
        # parameters, so they stay out of the echo to keep reports byte-stable
        "# config: "
        + " ".join(f"{k}={params[k]}" for k in sorted(params) if k not in ("out", "threads")),
    ]
    csv_text = "\n".join(header) + "\n" + rows_to_csv(rows)
    json_text = json.dumps(
        {"tool": f"specialpoint {__version__}", "subcommand": subcommand, "rows": rows},
        indent=2,
        default=float,
    )
    out = params.get("out")
    if out:
        base = Path(out)
        if base.suffix in (".csv", ".json"):
            base = base.with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_suffix(".csv").write_text(csv_text, encoding="utf-8")
        base.with_suffix(".json").write_text(json_text, encoding="utf-8")
    else:
        sys.stdout.write(json_text + "\n" if params.get("format") == "json" else csv_text)


# ---------------------------------------------------------------------------
# subcommand row builders


def _run_expsum(params: dict, threads: int) -> tuple[list[dict], bool]:
    m_max, n_max, c_max = params["m_max"], params["n_max"], params["c_max"]
    defects = ordered_map(
        lambda c: arith.luo_block_defect(m_max, n_max, c),
        range(1, c_max + 1),
        threads=threads,
    )
    rows = [
        {"c": c, "max_defect": d} for c, d in zip(range(1, c_max + 1), defects)
    ]
    return rows, max(defects) <= 1e-7


def _run_bessel(params: dict, threads: int) -> tuple[list[dict], bool]:
    weight = bessel.TestWeight(T=params["T"], Pi=params["Pi"])
    ys = (0.5, 2.0**-0.5, 1.0, 2.0**0.5, 2.0)
    vs = tuple(a * params["T"] for a in (0.1, 1.0, 2.0, 4.0, 6.0))
    grid = [(v, y) for v in vs for y in ys]
    evals = ordered_map(
        lambda p: bessel.fast_H(weight, "+", 2.0 * p[0] / p[1], p[1]),
        grid,
        threads=threads,
    )
    rows = []
    for (v, y), ev in zip(grid, evals):
        rows.append(
            {
                "x": 2.0 * v / y,
                "y": y,
                "sign": "+",
                "value_re": float(ev.value.real),
                "value_im": float(ev.value.imag),
                "est_error": float(ev.est_error),
            }
        )
    return rows, True


def _run_moments(params: dict, threads: int) -> tuple[list[dict], bool]:
    T, Pi, delta = params["T"], params["Pi"], params["delta"]

    def one(job: tuple) -> dict:
        kind = job[0]
        if kind == "diagonal_first":
            r = moments.diagonal_first(
                moments.MomentParams(T=T, Pi=Pi, delta=delta, m=job[1])
            )
        else:
            r = moments.diagonal_second(
                moments.MomentParams(T=T, Pi=Pi, delta=delta, m=job[1], m2=job[2])
            )
        gap = abs(r.numeric - r.main_term)
        return {
            "term": kind,
            "m1": job[1],
            "m2": job[2] if kind == "diagonal_second" else 0,
            "numeric": r.numeric,
            "main_term": r.main_term,
            "envelope": r.envelope,
            "within_envelope": gap <= r.envelope,
        }

    jobs = [
        ("diagonal_first", params["m"], None),
        ("diagonal_second", params["m1"], params["m2"]),
    ]
    rows = ordered_map(one, jobs, threads=threads)
    return rows, all(r["within_envelope"] for r in rows)


def _run_mollifier(params: dict, threads: int) -> tuple[list[dict], bool]:
    coeffs = mollifier.build_mollifier(params["M"])
    qf = mollifier.quadratic_forms(coeffs, T=params["T"], delta=params["delta"])
    normalized = coeffs.exact and qf.M20 * coeffs.Xi_exact == 1 and coeffs.x(1) == 1
    rows = [
        {
            "M": coeffs.M,
            "exact": coeffs.exact,
            "Xi": float(coeffs.Xi),
            "M20": float(qf.M20),
            "M20_breve": qf.M20_breve,
            "M20_delta": qf.M20_delta_yform,
            "M20_Xi_is_one": bool(normalized),
        }
    ]
    out = params.get("out")
    if out:
        base = Path(out)
        if base.suffix in (".csv", ".json"):
            base = base.with_suffix("")
        mollifier.export_coeffs_tsv(coeffs, str(base) + ".coeffs.tsv")
    return rows, bool(normalized) or not coeffs.exact


def _run_density(params: dict, threads: int) -> tuple[list[dict], bool]:
    T = params["T"]
    pair = density.FourierPair(density.v_law(params["mu"], "special_point"))
    if params.get("dataset"):
        ds = density.ingest_dataset(params["dataset"])
    else:
        rng = np.random.default_rng(params["seed"])
        ts = np.sort(10.0 + 40.0 * rng.random(5))
        ds = density.SpectralDataset(
            rows=[
                density.eisenstein_surrogate(float(t), T**pair.v + 1, delta=i % 2)
                for i, t in enumerate(ts)
            ]
        )

    def one(row: density.SpectralRow) -> dict:
        h = density.explicit_H(row.delta, row.t, pair, T)
        return {
            "t": row.t,
            "delta": row.delta,
            "H_quadrature": h.quadrature,
            "H_asymptotic": h.asymptotic,
            "P1": density.prime_sum_P(1, row, pair, T),
            "P2": density.prime_sum_P(2, row, pair, T),
        }

    return ordered_map(one, ds.rows, threads=threads), True


def _run_acceptance(params: dict, threads: int) -> tuple[list[dict], bool]:
    results = acceptance.run_all(threads=threads)
    for r in results:
        print(r.line())
    return acceptance.report_rows(results), all(r.passed for r in results)


_RUNNERS = {
    "expsum": _run_expsum,
    "bessel": _run_bessel,
    "moments": _run_moments,
    "mollifier": _run_mollifier,
    "density": _run_density,
    "acceptance": _run_acceptance,
}

_DEFAULTS = {
    "expsum": {"m_max": 10, "n_max": 10, "c_max": 100},
    "bessel": {"T": 500.0, "Pi": 30.0},
    "moments": {"T": 1000.0, "Pi": 1000.0**0.6, "m": 1, "m1": 1, "m2": 1, "delta": 0},
    "mollifier": {"M": 1000, "T": 1e6, "delta": 0},
    "density": {"T": 1000.0, "mu": 0.6, "seed": 1},
    "acceptance": {},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specialpoint",
        description="Numerical workbench for exponential sums, Bessel transforms, "
        "twisted moments, mollifiers, and one-level density checks.",
    )
    parser.add_argument("--config", help="flat `key = value` config file; flags win")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat `key = value` config file; flags win")
        p.add_argument("--T", type=float)
        p.add_argument("--Pi", type=float)
        p.add_argument("--M", type=int)
        p.add_argument("--mu", type=float)
        p.add_argument("--m", type=int)
        p.add_argument("--m1", type=int)
        p.add_argument("--m2", type=int)
        p.add_argument("--delta", type=int, choices=(0, 1))
        p.add_argument("--dataset")
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--threads", type=int)
        p.add_argument("--seed", type=int)
        scale = p.add_mutually_exclusive_group()
        scale.add_argument("--quick", action="store_true")
        scale.add_argument("--full", action="store_true")
        if name == "expsum":
            p.add_argument("--luo", action="store_true", help="Luo-identity defect sweep (default mode)")
            p.add_argument("--c-max", dest="c_max", type=int)
            p.add_argument("--m-max", dest="m_max", type=int)
            p.add_argument("--n-max", dest="n_max", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        params = _merge(args, _DEFAULTS[args.subcommand])
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    threads = params.get("threads") or default_threads()
    if args.full:
        params["c_max"] = params.get("c_max", 0) or 0
        if args.subcommand == "expsum":
            params["c_max"] = max(params["c_max"], 300)
            params["m_max"] = max(params.get("m_max", 0), 20)
            params["n_max"] = max(params.get("n_max", 0), 20)
    t0 = time.monotonic()
    try:
        rows, passed = _RUNNERS[args.subcommand](params, threads)
    except (ValueError, KeyError, ArithmeticError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    _emit(rows, params, args.subcommand)
    print(f"wall-clock: {time.monotonic() - t0:.2f}s", file=sys.stderr)
    return EXIT_OK if passed else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
