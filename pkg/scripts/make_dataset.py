#!/usr/bin/env python3
"""Generate a surrogate spectral dataset file for the density tooling.

Rows use the continuous-spectrum stand-in lambda(p) = 2 cos(t log p), which
is Hecke-consistent and always passes ingestion, so the output exercises the
full parse/validate/prime-sum pipeline without any external data.
"""

import argparse

import numpy as np

from specialpoint import density


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("out", help="output path")
    ap.add_argument("--rows", type=int, default=10)
    ap.add_argument("--p-max", type=float, default=1000.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    ts = np.sort(10.0 + 90.0 * rng.random(args.rows))
    ds = density.SpectralDataset(
        rows=[
            density.eisenstein_surrogate(float(t), args.p_max, delta=i % 2)
            for i, t in enumerate(ts)
        ]
    )
    density.write_dataset(ds, args.out)
    print(f"wrote {len(ds)} rows to {args.out}")


if __name__ == "__main__":
    main()
