#!/usr/bin/env python3
"""Independent check of the rational plane curve count recursion.

Computes N_d for d = 1..dmax with a plain bottom-up loop:

    N_d = sum over d1 + d2 = d, d1, d2 > 0 of
          (d1^2 d2^2 C(3d-4, 3d1-2) - d1^3 d2 C(3d-4, 3d1-1)) N_d1 N_d2

with N_1 = 1.  Deliberately kept free of any package imports so it can
serve as an oracle for the library implementation.  Exact arithmetic
throughout (Python ints).

Usage: kontsevich_oracle.py [dmax]
"""

import sys
from math import comb


def table(dmax):
    n = {1: 1}
    for d in range(2, dmax + 1):
        total = 0
        for d1 in range(1, d):
            d2 = d - d1
            total += (
                d1 * d1 * d2 * d2 * comb(3 * d - 4, 3 * d1 - 2)
                - d1 ** 3 * d2 * comb(3 * d - 4, 3 * d1 - 1)
            ) * n[d1] * n[d2]
        n[d] = total
    return [n[d] for d in range(1, dmax + 1)]


def main(argv):
    dmax = int(argv[1]) if len(argv) > 1 else 5
    if dmax < 1:
        print("dmax must be >= 1", file=sys.stderr)
        return 2
    for d, value in enumerate(table(dmax), start=1):
        print(d, value)
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
