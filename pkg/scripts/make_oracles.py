"""Freeze high-precision reference values used by the test-suite.

Bessel values come from the ascending power series summed in mpmath with
enough working digits to absorb the cancellation at large argument; Gamma
values come from a shifted Stirling series.  Neither route shares code with
``ssops.specfun``.

    python scripts/make_oracles.py            # writes tests/data/oracles.json
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"

A1_MU = [-0.5, 0.0, 0.5, 1.0, 1.5, 5.0]
A1_NU = [0.0, 1.0, 2.0]
A1_RHO = np.logspace(np.log10(0.01), 3.0, 60)


def bessel_series(mu, nu, rho):
    v = mp.mpc(mu, nu)
    x = mp.mpf(rho)
    with mp.workdps(40 + int(float(rho) / 2.2)):
        half = x / 2
        term = half ** v / mp.gamma(v + 1)
        total = term
        k = 0
        q = -half * half
        while True:
            k += 1
            term = term * q / (k * (k + v))
            total += term
            if k > x and abs(term) < mp.mpf(10) ** -40:
                break
        return complex(total)


def gamma_stirling(z, shift=60, terms=40):
    z = mp.mpc(z)
    with mp.workdps(50):
        w = z + shift
        lg = (w - mp.mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
        for k in range(1, terms):
            b = mp.bernoulli(2 * k)
            lg += b / (2 * k * (2 * k - 1) * w ** (2 * k - 1))
        prod = mp.mpf(1)
        for j in range(shift):
            prod *= z + j
        return complex(mp.exp(lg) / prod)


def main():
    mp.mp.dps = 30
    bessel = []
    for mu in A1_MU:
        for nu in A1_NU:
            for rho in A1_RHO:
                val = bessel_series(mu, nu, rho)
                bessel.append([mu, nu, float(rho), val.real, val.imag])
    extra = []
    for mu, nu, rho in [(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (1.5, 0.0, 2.0), (0.0, 1.0, 50.0),
                        (0.25, 0.0, 3.0), (-2.3, 0.5, 4.0), (-0.7, 0.0, 0.3), (10.0, 3.0, 40.0)]:
        val = bessel_series(mu, nu, rho)
        extra.append([mu, nu, rho, val.real, val.imag])
    gam = []
    for z in [0.5 + 1.0j, 3.7 - 2.2j, -2.5 + 0.5j, 0.1 + 0j, 20.0 + 15.0j, 1e-3 + 4.0j]:
        val = gamma_stirling(z)
        ref = complex(mp.gamma(z))
        assert abs(val - ref) <= 1e-14 * abs(ref), (z, val, ref)
        gam.append([z.real, z.imag, val.real, val.imag])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"bessel_a1": bessel, "bessel_extra": extra, "gamma": gam}, indent=0))
    print(f"wrote {OUT} ({len(bessel)} + {len(extra)} bessel, {len(gam)} gamma)")


if __name__ == "__main__":
    main()
