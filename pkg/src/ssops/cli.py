"""Command-line front end: ``python -m ssops <command> ...``.

Exit codes: 0 success, 1 validation/domain error, 2 accuracy or resolution
error (including failed self-tests and tolerance checks), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

from .errors import AccuracyError, ResolutionError, SsopsError

EXIT_OK, EXIT_VALIDATION, EXIT_ACCURACY, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_complex(text: str) -> complex:
    """``re`` or ``re,im``."""
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}") from exc
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def parse_rational(text: str):
    """Decimal or ``a/b``, kept exact."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _jsonable(obj):
    if is_dataclass(obj):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating, Fraction)) else x for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# self-tests


class _Checks:
    def __init__(self):
        self.lines = []
        self.ok = True

    def __call__(self, name, cond):
        cond = bool(cond)
        self.ok &= cond
        self.lines.append(f"{'ok  ' if cond else 'FAIL'} {name}")

    def report(self) -> int:
        sys.stdout.write("\n".join(self.lines) + "\n")
        return EXIT_OK if self.ok else EXIT_ACCURACY


def _selftest_bessel(c):
    from .specfun import BesselOrder, bessel_j, gamma_complex, normalized_bessel

    c("Gamma(1) = 1", abs(gamma_complex(1) - 1) < 1e-14)
    c("Gamma(1/2) = sqrt(pi)", abs(gamma_complex(0.5) - math.sqrt(math.pi)) < 1e-13)
    c("J_{1/2}(pi/2) = 2/pi", abs(bessel_j(BesselOrder(0.5), math.pi / 2).value - 2 / math.pi) < 1e-10)
    c("N_{1/2}(0) = sqrt(2/pi)", abs(normalized_bessel(BesselOrder(0.5), 0.0) - math.sqrt(2 / math.pi)) < 1e-13)
    c("N_0(0) = 1", abs(normalized_bessel(BesselOrder(0.0), 0.0) - 1) < 1e-14)


def _selftest_kernel(c):
    from .kernels import KernelSpec, kernel_value

    c("standard alpha=n is the ball indicator", abs(kernel_value(KernelSpec.make("standard", 2, 2), [0.3, 0.2]) - 1) < 1e-13)
    c("natural n=2 alpha=1 at (1/2,0) = 2/sqrt(3)",
      abs(kernel_value(KernelSpec.make("natural", 1, 2), [0.5, 0.0]) - 2 / math.sqrt(3)) < 1e-13)
    c("support in the unit ball", kernel_value(KernelSpec.make("flat", 0.5, 2), [1.5, 0.0]) == 0)


def _selftest_multiplier(c):
    from .kernels import KernelSpec, multiplier

    m = multiplier(KernelSpec.make("standard", 1.5, 3))
    c("n=3 alpha=3/2 at 1/4 = 4/pi", abs(m(0.25) - 4 / math.pi) < 1e-10)
    c("n=2 alpha=2 at 0 = pi", abs(multiplier(KernelSpec.make("standard", 2, 2))(0.0) - math.pi) < 1e-12)
    c("bessel potential s=1 at 1", abs(multiplier(KernelSpec.make("bessel_potential", 0, 2, s=1))(1.0) - 2 ** -0.5) < 1e-15)


def _selftest_region(c):
    from .regions import RegionQuery, lemma_one, remark_one, theorem_one, theorem_one_bounds

    F_ = Fraction
    c("n=3 s=1/2 alpha=3/2 bounds (2/3, 5/6)", theorem_one_bounds(3, F_(1, 2), F_(1, 2)) == (F_(2, 3), F_(5, 6)))
    c("p = q is inadmissible", not theorem_one(RegionQuery(3, F_(1, 2), F_(3, 2), 2, 2)).admissible)
    c("remark_one includes the left endpoint", remark_one(RegionQuery(3, 1, F_(3, 2), 2)).admissible)
    c("remark_one excludes alpha = n", not remark_one(RegionQuery(3, 1, 3, 2)).admissible)
    c("lemma_one with p = q", lemma_one(RegionQuery(2, 0, 1, 3)).admissible)


def _selftest_transform(c):
    from .fields import GridSpec, SampledField, apply_multiplier, gaussian, lp_norm

    g = GridSpec(2, 64, 2.0)
    f = gaussian(g, 0.5)
    out = apply_multiplier(f, lambda r: np.ones_like(r))
    c("identity multiplier round trip", np.max(np.abs(out.values - f.values)) < 1e-12)
    c("zero field has zero norm", lp_norm(SampledField.zeros(g), 3) == 0)


def _selftest_scan(c):
    from .fields import GridSpec
    from .scan import TestFamily, run_scan
    from .errors import ValidationError

    g = GridSpec(2, 64, 2.0)
    try:
        run_scan(2, 1.0, 1.0, 4 / 3, 4.0, TestFamily("ball_indicators", (0.5,)), g)
        c("scan runs on a resolvable member", True)
    except SsopsError:
        c("scan runs on a resolvable member", False)
    try:
        TestFamily("gaussian_dilates", (0.0,))
        c("zero scale rejected", False)
    except ValidationError:
        c("zero scale rejected", True)


def _selftest_hedberg(c):
    from .fields import GridSpec, SampledField, gaussian
    from .maximal import ConeRectanglePair, build_sphere_grid, hedberg_check

    g = GridSpec(2, 64, 2.0)
    c("zero field gives 0", hedberg_check(SampledField.zeros(g), 1.0, 4 / 3, 4.0, 2) == 0.0)
    sg = build_sphere_grid(2, 3, samples=2000)
    c("n=2 rho=3 has >= 51 directions", sg.count >= 51)
    c("directions are unit", np.max(np.abs(np.linalg.norm(sg.directions, axis=1) - 1)) < 1e-14)
    c("rectangle measure", ConeRectanglePair(sg.directions[0], 3, 2).measure == ConeRectanglePair.formula_measure(2, 3, 2))
    f = gaussian(g, 0.3)
    a, b = hedberg_check(f, 1.0, 4 / 3, 4.0, 2), hedberg_check(f * 7.0, 1.0, 4 / 3, 4.0, 2)
    c("scale invariance", abs(a - b) <= 1e-9 * a)


def _selftest_wave(c):
    from .fields import GridSpec, SampledField, lp_norm
    from .wave import WaveForcing, solve_wave

    g = GridSpec(2, 32, 2.0)
    t = np.linspace(0, 0.1, 11)
    fo = WaveForcing(g, t, [SampledField.zeros(g)] * len(t))
    c("zero forcing gives zero solution", lp_norm(solve_wave(fo, 0.1), 2) == 0)


def _selftest_theta(c):
    from .kernels import theta_endpoint_check

    r = theta_endpoint_check(1.0, 0.5, 2)
    c("critical z reproduces the standard kernel", r.critical_vs_standard < 1e-12)
    c("z = 0 reproduces the s-weighted kernel", r.zero_vs_sweighted < 1e-12)
    c("z = 1 reproduces the flat kernel", r.one_vs_flat < 1e-12)


# ---------------------------------------------------------------------------
# commands


def cmd_bessel(args):
    from .specfun import BesselOrder, bessel_j

    if args.rho is None:
        raise UsageError("bessel: --rho is required")
    val = bessel_j(BesselOrder(args.mu, args.nu), args.rho, method=args.method, tol=args.tol)
    rec = {"mu": args.mu, "nu": args.nu, "rho": args.rho, "re": val.value.real, "im": val.value.imag,
           "method": val.method, "est_abs_error": val.est_abs_error}
    if args.format == "csv":
        _emit(args, _csv(list(rec), [list(rec.values())]))
    else:
        _emit(args, dumps(rec))
    return EXIT_OK


def _spec_from(args):
    from .kernels import KernelSpec

    return KernelSpec.make(args.family, args.alpha, args.n, args.s, args.z)


def cmd_kernel(args):
    from .kernels import kernel_value

    spec = _spec_from(args)
    x = [float(v) for v in args.x.split(",")] if args.x else [args.radius] + [0.0] * (args.n - 1)
    val = kernel_value(spec, x)
    _emit(args, dumps({"family": spec.family.value, "alpha": spec.alpha, "n": spec.n, "s": spec.s,
                       "x": x, "value": complex(val)}))
    return EXIT_OK


def _multiplier_svg(rho, vals, title) -> str:
    w, h, pad = 600, 300, 40
    y = np.real(vals)
    ymin, ymax = float(min(y.min(), 0)), float(max(y.max(), 0))
    span = ymax - ymin or 1.0

    def X(r):
        return pad + (r - rho[0]) / (rho[-1] - rho[0] or 1.0) * (w - 2 * pad)

    def Y(v):
        return h - pad - (v - ymin) / span * (h - 2 * pad)

    pts = " ".join(f"{X(r):.2f},{Y(v):.2f}" for r, v in zip(rho, y))
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<line x1="{pad}" y1="{Y(0):.2f}" x2="{w - pad}" y2="{Y(0):.2f}" stroke="gray"/>',
        f'<polyline points="{pts}" fill="none" stroke="#3182bd" stroke-width="1.5"/>',
        f'<text x="{w / 2}" y="20" text-anchor="middle" font-size="13">{title}</text>',
        f'<text x="{w / 2}" y="{h - 8}" text-anchor="middle" font-size="12">|xi|</text>',
        "</svg>",
    ]) + "\n"


def cmd_multiplier(args):
    from .kernels import multiplier

    spec = _spec_from(args)
    m = multiplier(spec)
    if args.rho:
        rho = np.array([float(v) for v in args.rho.split(",")])
    else:
        rho = np.linspace(args.rho_min, args.rho_max, args.points)
    vals = m(rho)
    if args.emit == "svg":
        _emit(args, _multiplier_svg(rho, vals, m.label))
    elif args.emit == "json":
        _emit(args, dumps({"label": m.label, "decay_exponent": m.decay_exponent, "index": m.index,
                           "rho": rho, "re": vals.real, "im": vals.imag}))
    else:
        _emit(args, _csv(["rho", "re", "im"], zip(rho, vals.real, vals.imag)))
    return EXIT_OK


def cmd_region(args):
    from .regions import (RegionQuery, lemma_one, lemma_two, polygon_csv, region_polygon, region_svg,
                          remark_one, theorem_one, theorem_two)

    if args.p is not None:
        rules = {"theorem_one": theorem_one, "theorem_two": theorem_two, "remark_one": remark_one,
                 "lemma_one": lemma_one, "lemma_two": lemma_two}
        verdict = rules[args.rule](RegionQuery(args.n, args.s, args.alpha, args.p, args.q))
        _emit(args, dumps({"rule": verdict.rule, "admissible": verdict.admissible, "boundary": verdict.boundary,
                           "constraints": [dict(describe=c.describe(), satisfied=c.satisfied) for c in verdict.binding]}))
        return EXIT_OK
    if args.emit == "svg":
        _emit(args, region_svg(args.n, args.s, args.alpha))
        return EXIT_OK
    extra = () if args.alpha is None else (args.alpha,)
    rows = region_polygon(args.n, args.s, args.steps, extra)
    if args.emit == "json":
        _emit(args, dumps(rows))
    else:
        _emit(args, polygon_csv(rows))
    return EXIT_OK


def cmd_transform_check(args):
    from .fields import GridSpec
    from .kernels import KernelSpec, transform_check

    rep = transform_check(KernelSpec.make("standard", args.alpha, args.n), GridSpec(args.n, args.grid, args.half_width),
                          args.max_frequency)
    out = _jsonable(rep)
    out["tolerance"] = args.tol
    out["passed"] = rep.max_rel_error <= args.tol
    _emit(args, dumps(out))
    return EXIT_OK if out["passed"] else EXIT_ACCURACY


def cmd_scan(args):
    from .fields import GridSpec
    from .scan import TestFamily

    from .scan import run_scan

    if args.scales:
        fam = TestFamily(args.family, tuple(float(v) for v in args.scales.split(",")), args.seed)
    else:
        fam = TestFamily.dyadic(args.family, args.scale_lo, args.scale_hi, args.seed)
    grid = GridSpec(args.n, args.grid or (512 if args.n == 2 else 128), args.half_width)
    rep = run_scan(args.n, args.alpha, args.s, float(args.p), float(args.q), fam, grid,
                   diagnostic=args.diagnostic, threads=args.threads)
    _emit(args, rep.to_csv() if args.format == "csv" else rep.to_json())
    return EXIT_OK


def cmd_hedberg(args):
    from .fields import GridSpec
    from .maximal import maximal_csv, maximal_scan, maximal_test_family, shell_cone_inclusion_check

    rhos = [int(v) for v in args.rho.split(",")]
    if max(rhos) > args.rho_cap:
        raise SsopsError(f"rho above the cap {args.rho_cap}; raise --rho-cap")
    N = args.grid or 2 ** (max(rhos) + 4)
    grid = GridSpec(args.n, N, args.half_width)
    fam = maximal_test_family(grid, args.bumps, args.seed)
    viol = {r: shell_cone_inclusion_check(args.n, r, args.samples, seed=args.seed) for r in rhos}
    rows = maximal_scan(fam, rhos, args.alpha, float(args.p), float(args.q), violations=viol, workers=args.threads)
    if args.format == "json":
        _emit(args, dumps(rows))
    else:
        _emit(args, maximal_csv(rows))
    return EXIT_OK


def cmd_wave(args):
    from .fields import GridSpec, gaussian, lp_norm
    from .wave import WaveForcing, duhamel_estimate_check, energy, read_forcing, solve_wave

    if args.forcing:
        fo = read_forcing(args.forcing)
    else:
        grid = GridSpec(args.n, args.grid or (128 if args.n == 2 else 64), args.half_width)
        count = int(round(args.t_max / args.dt)) + 1
        times = args.dt * np.arange(count)
        T = args.switch_off
        phi = np.where(times < T, np.sin(np.pi * times / T) ** 2, 0.0)
        fo = WaveForcing.separable(gaussian(grid, args.width), phi, times)
    t = args.t if args.t is not None else float(fo.times[-1])
    u = solve_wave(fo, t, args.threads)
    rec = {"t": t, "dt": fo.dt, "points_per_axis": fo.grid.points_per_axis, "n": fo.grid.n,
           "l2_norm": lp_norm(u, 2), "energy": energy(fo, t, args.threads)}
    if args.p is not None:
        rec["estimate_ratio"] = duhamel_estimate_check(fo, t, float(args.p), float(args.q), args.s, args.threads)
    _emit(args, dumps(rec))
    return EXIT_OK


def cmd_theta_check(args):
    from .kernels import theta_endpoint_check

    rep = theta_endpoint_check(args.alpha, args.s, args.n)
    out = _jsonable(rep)
    out["tolerance"] = args.tol
    out["passed"] = rep.max_discrepancy <= args.tol
    _emit(args, dumps(out))
    return EXIT_OK if out["passed"] else EXIT_ACCURACY


SELFTESTS = {
    "bessel": _selftest_bessel, "kernel": _selftest_kernel, "multiplier": _selftest_multiplier,
    "region": _selftest_region, "transform-check": _selftest_transform, "scan": _selftest_scan,
    "hedberg": _selftest_hedberg, "wave": _selftest_wave, "theta-check": _selftest_theta,
}


def _threads_default():
    env = os.environ.get("SSOPS_THREADS")
    try:
        return int(env) if env else None
    except ValueError:
        return None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssops", description="Spherically singular fractional integrals: numerical checks.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--selftest", action="store_true", help="run the built-in examples and exit")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
        sp.add_argument("--threads", type=int, default=_threads_default(),
                        help="worker cap (default: $SSOPS_THREADS)")
        return sp

    def kernel_args(sp, family="standard"):
        sp.add_argument("--family", default=family,
                        choices=["standard", "natural", "flat", "sweighted", "bessel_potential", "theta"])
        sp.add_argument("--alpha", type=parse_complex, default=complex(1.0))
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--s", type=float, default=0.0)
        sp.add_argument("--z", type=parse_complex, default=0j)

    sp = add("bessel", cmd_bessel, "J_{mu+i nu}(rho)")
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--nu", type=float, default=0.0)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--method", choices=["auto", "closed_form"], default="auto")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = add("kernel", cmd_kernel, "physical-space kernel value")
    kernel_args(sp)
    sp.add_argument("--x", help="comma-separated point")
    sp.add_argument("--radius", type=float, default=0.5, help="|x| when --x is absent")

    sp = add("multiplier", cmd_multiplier, "radial multiplier profile")
    kernel_args(sp)
    sp.add_argument("--rho", help="comma-separated radii")
    sp.add_argument("--rho-min", type=float, default=0.0)
    sp.add_argument("--rho-max", type=float, default=5.0)
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--emit", choices=["csv", "json", "svg"], default="csv")

    sp = add("region", cmd_region, "admissible exponent regions")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--s", type=parse_rational, default=Fraction(1, 2))
    sp.add_argument("--alpha", type=parse_rational)
    sp.add_argument("--steps", type=int, default=21)
    sp.add_argument("--p", type=parse_rational)
    sp.add_argument("--q", type=parse_rational)
    sp.add_argument("--rule", default="theorem_one",
                    choices=["theorem_one", "theorem_two", "remark_one", "lemma_one", "lemma_two"])
    sp.add_argument("--emit", choices=["csv", "json", "svg"], default="csv")

    sp = add("transform-check", cmd_transform_check, "kernel transform versus multiplier")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--alpha", type=parse_complex, default=complex(1.0))
    sp.add_argument("--grid", type=int, default=512)
    sp.add_argument("--half-width", type=float, default=2.0)
    sp.add_argument("--max-frequency", type=float, default=32.0)
    sp.add_argument("--tol", type=float, default=0.03)

    sp = add("scan", cmd_scan, "norm-ratio scan over a test family")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--alpha", type=float, default=1.5)
    sp.add_argument("--s", type=float, default=0.5)
    sp.add_argument("--p", type=parse_rational, default=Fraction(4, 3))
    sp.add_argument("--q", type=parse_rational, default=Fraction(4))
    sp.add_argument("--family", default="gaussian_dilates",
                    choices=["gaussian_dilates", "ball_indicators", "knapp_caps", "random_bumps"])
    sp.add_argument("--scales", help="comma-separated scales")
    sp.add_argument("--scale-lo", type=int, default=-4, help="smallest scale exponent (base 2)")
    sp.add_argument("--scale-hi", type=int, default=0)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--half-width", type=float, default=4.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--diagnostic", action="store_true", help="allow parameters outside the region")
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = add("hedberg", cmd_hedberg, "maximal-operator and Hedberg constants")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--p", type=parse_rational, default=Fraction(4, 3))
    sp.add_argument("--q", type=parse_rational, default=Fraction(4))
    sp.add_argument("--rho", default="3,4,5")
    sp.add_argument("--rho-cap", type=int, default=6)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--half-width", type=float, default=2.0)
    sp.add_argument("--bumps", type=int, default=5)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=["json", "csv"], default="csv")

    sp = add("wave", cmd_wave, "forced wave equation")
    sp.add_argument("--forcing", help="manifest.json of a stored forcing")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--half-width", type=float, default=4.0)
    sp.add_argument("--width", type=float, default=0.5)
    sp.add_argument("--dt", type=float, default=1 / 256)
    sp.add_argument("--t-max", type=float, default=1.0)
    sp.add_argument("--switch-off", type=float, default=0.5)
    sp.add_argument("--t", type=float)
    sp.add_argument("--p", type=parse_rational)
    sp.add_argument("--q", type=parse_rational)
    sp.add_argument("--s", type=float, default=0.5)

    sp = add("theta-check", cmd_theta_check, "analytic-family endpoint identities")
    sp.add_argument("--alpha", type=parse_complex, default=complex(1.0))
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--tol", type=float, default=1e-9)
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.selftest:
            checks = _Checks()
            SELFTESTS[args.command](checks)
            return checks.report()
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (AccuracyError, ResolutionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ACCURACY
    except (SsopsError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
