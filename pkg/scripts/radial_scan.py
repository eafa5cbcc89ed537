"""Norm ratio for Gaussian dilates in n = 3 without a grid.

For radial f the convolution with the alpha = 3/2 kernel and the Sobolev
lift are radial too, so both norms reduce to one-dimensional radial
transforms.  This gives the ratio at scales the 128^3 lattice cannot
resolve and shows how it moves with the scale.

    python scripts/radial_scan.py --scales 1,0.5,0.25,0.125,0.0625
"""

import argparse
import math

import numpy as np


def radial_inverse(fhat, r, band, nodes=200_001, chunk=64):
    """3-d inverse transform of a radial spectrum, ``2/r int fhat(rho) sin(2 pi r rho) rho drho``."""
    rho = np.linspace(0.0, band, nodes)
    w = np.full(nodes, rho[1])
    w[0] = w[-1] = 0.5 * rho[1]
    vals = fhat(rho) * rho * w
    out = np.empty(len(r))
    for i in range(0, len(r), chunk):
        rr = r[i:i + chunk]
        s = np.sin(2 * np.pi * rr[:, None] * rho[None, :]) @ vals
        safe = np.where(rr > 0, rr, 1.0)
        out[i:i + chunk] = np.where(rr > 0, 2.0 / safe * s, 4 * np.pi * np.sum(fhat(rho) * rho ** 2 * w))
    return out


def radial_norm(g, r, p):
    dr = r[1] - r[0]
    return (4 * np.pi * np.sum(np.abs(g) ** p * r ** 2) * dr) ** (1 / p)


def ratio(d, p=4 / 3, q=4.0, s=0.5, points=1500):
    """``||f * K||_q / ||f||_{L^p_s}`` for ``f = exp(-pi |x|^2 / d^2)`` in R^3."""
    spec = lambda rho: d ** 3 * np.exp(-np.pi * (d * rho) ** 2)
    band = 8.0 / d
    r = np.linspace(0.0, 1.0 + 6.0 * d, points)
    conv = radial_inverse(lambda rho: spec(rho) * 2 * np.sinc(2 * rho), r, band)
    lift = radial_inverse(lambda rho: spec(rho) * (1 + rho ** 2) ** (s / 2), r, band)
    return radial_norm(conv, r, q) / radial_norm(lift, r, p)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scales", default="1,0.5,0.25,0.125,0.0625")
    args = ap.parse_args()
    scales = [float(v) for v in args.scales.split(",")]
    vals = [float(ratio(d)) for d in scales]
    print("scale,ratio")
    for d, v in zip(scales, vals):
        print(f"{d!r},{v!r}")
    slope = np.polyfit(np.log(scales), np.log(vals), 1)[0]
    print(f"# spread {max(vals) / min(vals):.3f}  slope {slope:.3f}")


if __name__ == "__main__":
    main()
