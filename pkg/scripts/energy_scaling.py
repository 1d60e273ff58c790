"""How J(H, M) compares with the main term H^2 M^2 / p as H grows.

Prints a CSV with J / main_term and the fitted constant of the basic
envelope for random sets of fixed size at one prime.

    python3 scripts/energy_scaling.py --p 1009 --size 20 --seed 3
"""

import argparse
import math
import sys

from congsum.congruence import JQuery, j_count_fast, main_term
from congsum.csvio import write_rows
from congsum.field import make_field_ctx
from congsum.sets import make_set


def scan(p: int, size: int, seed: int, points: int) -> list[dict]:
    ctx = make_field_ctx(p)
    mset = make_set(ctx, "random", seed=seed, size=size)
    M = len(mset)
    rows = []
    for H in sorted({min(p - 1, max(1, round(p ** (k / points)))) for k in range(1, points + 1)}):
        J = j_count_fast(ctx, JQuery(H, mset))
        main = main_term(p, H, M)
        rows.append({
            "p": p, "H": H, "M": M, "seed": seed, "J": J,
            "main_term": main,
            "J_over_main": J / main,
            "envelope_constant": max(J - main, 0) / (H * M ** 1.5 * math.log(p)),
        })
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=1009)
    ap.add_argument("--size", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()
    write_rows(scan(args.p, args.size, args.seed, args.points), sys.stdout)
