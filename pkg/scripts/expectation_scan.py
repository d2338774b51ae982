#!/usr/bin/env python3
"""Scan the direct two-site expectation over a grid of spectral points.

For a small chain the dominant-eigenvector functional is exact; each value
is cross-checked against the brute-force trace oracle.
"""

import argparse
from fractions import Fraction

from s1fc.engine import (
    brute_force_expectation,
    build_ss_operator,
    direct_expectation,
    dominant_state,
)
from s1fc.lattice import MatsubaraData


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matsubara", help="chain file (JSON/TOML); default 2-site spin-1/2")
    ap.add_argument("--steps", type=int, default=5, help="grid points per axis")
    args = ap.parse_args()

    if args.matsubara:
        md = MatsubaraData.from_file(args.matsubara)
    else:
        md = MatsubaraData(
            L=2,
            spins=(Fraction(1, 2), Fraction(1, 2)),
            tau=(Fraction(0), Fraction(1, 5)),
        )
    state = dominant_state(md)
    print(f"dominant eigenvalue: {state.eigenvalue} (exact={state.exact})")

    op = build_ss_operator(2)
    grid = [Fraction(k, 2 * args.steps) for k in range(1, args.steps + 1)]
    print(f"{'lam1':>8} {'lam2':>8}  value")
    for l1 in grid:
        for l2 in grid:
            if l1 == l2:
                continue
            v = direct_expectation(op, [l1, l2], md, state=state)
            assert brute_force_expectation(op, [l1, l2], md) == v
            print(f"{str(l1):>8} {str(l2):>8}  {v}")


if __name__ == "__main__":
    main()
