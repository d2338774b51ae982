#!/usr/bin/env python3
"""Compute the boundary correlators and compare against the stored values.

Runs the exact pipeline for n = 2, 3 and evaluates the stored reference
polynomials for n = 4, 5.  Timings are wall-clock.
"""

import argparse
import time

from s1fc.pipeline import correlator, reference_values


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--digits", type=int, default=50)
    args = ap.parse_args()

    print(f"{'n':>3}  {'source':8}  {'decimal':>24}  {'seconds':>8}  exact")
    for n in (2, 3):
        t0 = time.monotonic()
        res = correlator(n, digits=args.digits)
        dt = time.monotonic() - t0
        print(f"{n:>3}  {'pipeline':8}  {res.decimal:>24}  {dt:8.2f}  {res.exact.pretty()}")
        ref = reference_values(n, digits=args.digits)
        tag = "agree" if ref.exact == res.exact else "DISAGREE"
        print(f"{n:>3}  {'stored':8}  {ref.decimal:>24}  {'':8}  {tag}")
    for n in (4, 5):
        res = reference_values(n, digits=args.digits)
        print(f"{n:>3}  {'stored':8}  {res.decimal:>24}  {'':8}  degree {res.exact.max_power() // 2} in pi^2")


if __name__ == "__main__":
    main()
