"""Hedberg constants and maximal-operator norm ratios over the standard test family.

    python scripts/maximal_scan.py --rho 3,4,5 --grid 512 --out maximal.csv
"""

import argparse
import time

from ssops.fields import GridSpec
from ssops.maximal import maximal_csv, maximal_scan, maximal_test_family, shell_cone_inclusion_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rho", default="3,4,5")
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--half-width", type=float, default=2.0)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=4 / 3)
    ap.add_argument("--q", type=float, default=4.0)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    rhos = [int(v) for v in args.rho.split(",")]
    grid = GridSpec(2, args.grid, args.half_width)
    t0 = time.perf_counter()
    viol = {r: shell_cone_inclusion_check(2, r, args.samples, seed=args.seed) for r in rhos}
    rows = maximal_scan(maximal_test_family(grid, 5, args.seed), rhos, args.alpha, args.p, args.q, violations=viol)
    text = maximal_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    h = [r.hedberg for r in rows]
    print(f"# hedberg spread {max(h) / min(h):.3f}, {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
