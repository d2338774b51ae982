#!/usr/bin/env python3
"""Exercise the exact lattice identities on a small Matsubara chain.

Yang-Baxter at random rational points, the fusion identity, transfer-matrix
commutation, and the fused/unfused eigenvalue relation with the quantum
determinant.  Everything is exact rational arithmetic; any failure raises.
"""

import argparse
import random
import time
from fractions import Fraction

from s1fc.lattice import (
    MatsubaraData,
    check_commutation,
    check_eigen_relation,
    check_fusion,
    check_yang_baxter,
    lax,
    quantum_determinant,
    r_s1,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matsubara", help="chain file (JSON/TOML); default mixed 1/2 + 1")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.matsubara:
        md = MatsubaraData.from_file(args.matsubara)
    else:
        md = MatsubaraData(
            L=2,
            spins=(Fraction(1, 2), Fraction(1)),
            tau=(Fraction(0), Fraction(1, 4)),
        )
    print(f"chain: L={md.L} spins={[str(s) for s in md.spins]} tau={[str(t) for t in md.tau]}")

    rng = random.Random(args.seed)
    t0 = time.monotonic()
    for _ in range(args.trials):
        z = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        e = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        assert check_yang_baxter(r_s1, r_s1, r_s1, z, e)
        assert check_yang_baxter(
            lambda x: lax(x, 2), lambda x: lax(x, 2), r_s1, z, e, dims=(2, 3, 3)
        )
    print(f"yang-baxter      ok at {args.trials} random points "
          f"({time.monotonic() - t0:.2f}s)")

    for n in (1, 2):
        assert check_fusion(Fraction(2, 7), md, n=n)
    print("fusion           ok for n = 1, 2")

    assert check_commutation(md, Fraction(1, 3), Fraction(2, 5), fused=False)
    assert check_commutation(md, Fraction(1, 3), Fraction(2, 5), fused=True)
    print("commutation      ok (plain and fused)")

    points = [Fraction(1, 3), Fraction(5, 7), Fraction(9, 2)]
    assert check_eigen_relation(md, points)
    for p in points:
        print(f"eigen relation   ok at {p}; Delta = {quantum_determinant(p, md)}")


if __name__ == "__main__":
    main()
