"""Numerical workbench for special-point moment computations.

Modules: exponential sums (`arith`, `characters`), completed-gamma and AFE
weights (`specialfn`), Gaussian-windowed Bessel transforms (`bessel`),
twisted-moment main terms (`moments`), the optimal mollifier (`mollifier`),
one-level-density ingredients (`density`), and the acceptance suite
(`acceptance`).  Every fast path has an independent brute-force oracle next
to it; the tests cross-validate the two.
"""

__version__ = "0.1.0"

__all__ = [
    "arith",
    "characters",
    "specialfn",
    "bessel",
    "moments",
    "mollifier",
    "density",
    "acceptance",
    "cli",
    "util",
]
