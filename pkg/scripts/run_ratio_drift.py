#!/usr/bin/env python3
"""Class-ratio drift sweep.

Holds the reference at a balanced two-class mixture and sweeps the target's
positive-class fraction, tabulating the drift score per fraction. The curve
should bottom out at 0.5 and rise steeply toward either endpoint.
"""

import argparse
import json

from driftscan.scan import ScanConfig
from driftscan.simharness import axis_mixture_spec, ratio_drift_study


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=5000, help="samples per side")
    p.add_argument("--dims", type=int, default=16)
    p.add_argument("--fractions", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--window", type=int, default=32)
    p.add_argument("--bootstraps", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="ratio_drift.csv")
    args = p.parse_args()

    fractions = [float(f) for f in args.fractions.split(",")]
    base = axis_mixture_spec(args.dims, args.n, 0.5, args.seed)
    scan = ScanConfig(window=args.window, bootstraps=args.bootstraps, seed=args.seed)
    rows = ratio_drift_study(base, fractions, scan, batch_size=args.batch_size)

    config = {"n": args.n, "dims": args.dims, "batch_size": args.batch_size,
              "scan": scan.to_dict()}
    with open(args.out, "w") as fh:
        fh.write(f"# config: {json.dumps(config)}\n")
        fh.write("fraction,summary_score\n")
        for fraction, score in rows:
            fh.write(f"{fraction!r},{score!r}\n")

    print(f"{'fraction':>10} {'summary_score':>15}")
    for fraction, score in rows:
        print(f"{fraction:>10.2f} {score:>15.6f}")
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
