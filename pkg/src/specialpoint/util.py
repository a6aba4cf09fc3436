"""Shared numeric plumbing: exact-argument complex exponentials, deterministic
reductions, and a small ordered thread-pool map.

The exponential-sum modules funnel every unit-circle evaluation through
:func:`e_frac` so that the argument is reduced mod 1 in exact integer
arithmetic before touching floating point; this is what keeps 1e-9-level
defect checks meaningful for moduli in the thousands.
"""

from __future__ import annotations

import concurrent.futures
import math
import os
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

_T = TypeVar("_T")
_R = TypeVar("_R")

TWO_PI = 2.0 * math.pi


def e_frac(num: int, den: int) -> complex:
    """exp(2*pi*i*num/den) with the argument reduced mod 1 exactly first."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    r = num % den
    theta = TWO_PI * (r / den)
    return complex(math.cos(theta), math.sin(theta))


def e_frac_array(nums: np.ndarray, den: int) -> np.ndarray:
    """Vectorized :func:`e_frac` for an integer numerator array."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    r = np.asarray(nums, dtype=np.int64) % den
    theta = TWO_PI * (r / den)
    return np.cos(theta) + 1j * np.sin(theta)


def pairwise_sum(values: Sequence[complex]) -> complex:
    """Sum by a fixed balanced binary tree.

    Thread-count independent and run-to-run deterministic: the reduction
    order depends only on len(values), never on scheduling.
    """
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def default_threads() -> int:
    env = os.environ.get("SPECIALPOINT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def ordered_map(fn: Callable[[_T], _R], items: Iterable[_T], threads: int = 1) -> list[_R]:
    """Map preserving input order; with threads > 1 uses a pool but the
    returned list (and therefore any downstream reduction) is identical to
    the sequential result."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fmt_g17(x: float) -> str:
    """17-significant-digit decimal rendering used by all CSV emitters."""
    return format(float(x), ".17g")


def rows_to_csv(rows: Sequence[dict]) -> str:
    """Render homogeneous dict rows as CSV: header row, `.` decimal point,
    floats at 17 significant digits.  The single emission path shared by the
    CLI and the acceptance runner, so determinism checks compare bytes."""
    if not rows:
        return "\n"
    cols = list(rows[0].keys())

    def cell(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return fmt_g17(v)
        return str(v)

    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(cell(row[c]) for c in cols))
    return "\n".join(lines) + "\n"
