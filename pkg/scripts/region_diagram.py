"""Region tables and diagrams for several smoothness values.

    python scripts/region_diagram.py --n 3 --s 1/4,1/2,1,2 --alpha 3/2 --out regions/
"""

import argparse
from fractions import Fraction
from pathlib import Path

from ssops.regions import polygon_csv, region_polygon, region_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--s", default="1/4,1/2,1,2")
    ap.add_argument("--alpha", type=Fraction, default=Fraction(3, 2))
    ap.add_argument("--steps", type=int, default=21)
    ap.add_argument("--out", type=Path, default=Path("regions"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for text in args.s.split(","):
        s = Fraction(text)
        tag = f"n{args.n}_s{str(s).replace('/', 'o')}"
        rows = region_polygon(args.n, s, args.steps, [args.alpha])
        (args.out / f"{tag}.csv").write_text(polygon_csv(rows))
        (args.out / f"{tag}.svg").write_text(region_svg(args.n, s, args.alpha))
        print(f"wrote {tag}.csv and {tag}.svg")


if __name__ == "__main__":
    main()
