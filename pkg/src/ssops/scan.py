"""Norm-ratio scans ``||f * Omega||_q / ||f||_{L^p_s}`` over families of test functions."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fields as F
from .errors import DomainError, ResolutionError, ValidationError
from .fields import GridSpec, SampledField
from .kernels import KernelSpec, multiplier

MIN_CELLS = 8
GROWTH_FLAG = 0.3


class FamilyKind(str, enum.Enum):
    GAUSSIAN_DILATES = "gaussian_dilates"
    BALL_INDICATORS = "ball_indicators"
    KNAPP_CAPS = "knapp_caps"
    RANDOM_BUMPS = "random_bumps"


@dataclass(frozen=True)
class TestFamily:
    """A one-parameter family of test functions indexed by ``scales``.

    Member at scale ``d``:

    * ``gaussian_dilates``: ``exp(-pi |x|^2 / d^2)``.
    * ``ball_indicators``: indicator of ``|x| < d``.
    * ``knapp_caps``: transform equal to a smooth bump on the cap
      ``| |xi| - 1/d | < 1/2``, angle to ``e_1`` below ``d^(1/2) / 2``.
      This is the unit-radius Knapp shape (radial width ``d``, angular width
      ``d^(1/2)``) dilated to radius ``1/d``; physically a slab of length 1 and
      cross-section ``d^(1/2)`` oscillating at wavelength ``d``.
    * ``random_bumps``: 3 to 6 Gaussians of width ``d`` times ``U(0.5, 1)``
      with random centres and signed amplitudes.
    """

    __test__ = False

    kind: FamilyKind
    scales: tuple
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        sc = tuple(float(d) for d in self.scales)
        if not sc or any(not d > 0 for d in sc):
            raise ValidationError("scales must be positive")
        object.__setattr__(self, "scales", sc)

    @classmethod
    def dyadic(cls, kind, lo: int = -4, hi: int = 0, seed: int = 0) -> "TestFamily":
        """Scales ``2^hi, ..., 2^lo``."""
        return cls(kind, tuple(2.0 ** k for k in range(hi, lo - 1, -1)), seed)

    def feature_size(self, d: float) -> float:
        """Smallest length the grid must resolve for the member at scale ``d``."""
        return d

    def member(self, grid: GridSpec, index: int) -> SampledField:
        d = self.scales[index]
        kind = self.kind
        if kind is FamilyKind.GAUSSIAN_DILATES:
            return F.gaussian(grid, d)
        if kind is FamilyKind.BALL_INDICATORS:
            return F.ball_indicator(grid, d)
        if kind is FamilyKind.KNAPP_CAPS:
            return knapp_cap(grid, d)
        rng = np.random.default_rng([self.seed, index])
        reach = 0.5 * (grid.half_width - 1.0)
        pts = grid.points()
        vals = np.zeros(grid.shape)
        for _ in range(int(rng.integers(3, 7))):
            c = rng.uniform(-1.0, 1.0, grid.n)
            c *= reach * rng.uniform() / max(np.linalg.norm(c), 1e-12)
            w = d * rng.uniform(0.5, 1.0)
            amp = rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
            vals += amp * np.exp(-np.pi * np.sum((pts - c) ** 2, axis=-1) / w ** 2)
        return SampledField(grid, vals)


def _bump(t):
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def knapp_cap(grid: GridSpec, d: float) -> SampledField:
    """Field whose transform is a smooth bump on a Knapp cap at radius ``1/d``."""
    R = 1.0 / d
    half_angle = 0.5 * math.sqrt(d)
    fr = grid.frequencies()
    mesh = np.meshgrid(*([fr] * grid.n), indexing="ij")
    rad = np.sqrt(sum(m * m for m in mesh))
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = np.where(rad > 0, mesh[0] / np.where(rad > 0, rad, 1.0), 0.0)
    ang = np.arccos(np.clip(cosang, -1.0, 1.0))
    fh = _bump((rad - R) / 0.5) * _bump(ang / half_angle)
    if not fh.any():
        raise ResolutionError(f"knapp cap at scale {d:g} falls between lattice frequencies")
    return F.from_spectrum(grid, fh)


@dataclass(frozen=True)
class ScanRow:
    index: int
    scale: float
    lhs: float  # ||f * Omega||_q
    rhs: float  # ||f||_{L^p_s}
    ratio: float


@dataclass(frozen=True)
class ScanReport:
    n: int
    alpha: float
    s: float
    p: float
    q: float
    family: str
    points_per_axis: int
    half_width: float
    diagnostic: bool
    rows: tuple
    max_ratio: float = field(init=False)
    min_ratio: float = field(init=False)
    spread: float = field(init=False)
    slope: float = field(init=False)
    growth_flag: bool = field(init=False)

    def __post_init__(self):
        r = np.array([row.ratio for row in self.rows])
        sc = np.array([row.scale for row in self.rows])
        object.__setattr__(self, "max_ratio", float(r.max()))
        object.__setattr__(self, "min_ratio", float(r.min()))
        object.__setattr__(self, "spread", float(r.max() / r.min()) if r.min() > 0 else math.inf)
        if len(r) > 1 and np.all(r > 0) and np.ptp(sc) > 0:
            slope = float(np.polyfit(np.log(sc), np.log(r), 1)[0])
        else:
            slope = 0.0
        object.__setattr__(self, "slope", slope)
        # growth as the scale shrinks means a negative slope in log(scale)
        object.__setattr__(self, "growth_flag", bool(-slope > GROWTH_FLAG))

    def to_json(self) -> str:
        d = asdict(self)
        d["rows"] = [asdict(r) for r in self.rows]
        return json.dumps(d, sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "scale", "norm_q_of_convolution", "sobolev_norm_p_s", "ratio"])
        for r in self.rows:
            w.writerow([r.index, repr(r.scale), repr(r.lhs), repr(r.rhs), repr(r.ratio)])
        return buf.getvalue()


def _region_verdict(n, alpha, s, p, q):
    from .regions import RegionQuery, alpha_critical, remark_one, theorem_one, theorem_two

    query = RegionQuery(n, s, alpha, p, q)
    if abs(p - q) <= 1e-12:
        if alpha >= alpha_critical(n):
            return remark_one(query)
        return theorem_two(query)
    return theorem_one(query)


def default_threads() -> int:
    env = os.environ.get("SSOPS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"SSOPS_THREADS must be an integer, got {env!r}") from exc
    return 1


def run_scan(n: int, alpha: float, s: float, p: float, q: float, family: TestFamily, grid: GridSpec,
             *, diagnostic: bool = False, threads: int | None = None) -> ScanReport:
    """Norm ratios for every family member with the standard kernel of order ``alpha``.

    Parameters outside the admissible region need ``diagnostic=True``; those
    runs only report growth and never count as counterexamples.
    """
    if grid.n != n:
        raise ValidationError("grid dimension differs from n")
    if not diagnostic:
        try:
            verdict = _region_verdict(n, alpha, s, p, q)
        except DomainError as exc:
            raise DomainError(f"{exc}; pass diagnostic=True to scan outside the hypotheses") from exc
        if not verdict.admissible:
            bad = "; ".join(c.describe() for c in verdict.violated)
            raise DomainError(f"parameters outside the admissible region ({bad}); pass diagnostic=True")
    h = grid.spacing
    for d in family.scales:
        cells = family.feature_size(d) / h
        if cells < MIN_CELLS:
            raise ResolutionError(
                f"scale {d:g} spans {cells:.2g} cells (< {MIN_CELLS}) at spacing {h:g}; refine the grid")
    symbol = F.symbol_on_grid(grid, multiplier(KernelSpec.make("standard", alpha, n)))
    lift = F.bessel_potential_symbol(grid, -s)

    def job(i):
        f = family.member(grid, i)
        if not np.any(f.values):
            raise ValidationError(f"family member {i} is identically zero")
        lhs = F.lp_norm(F.apply_symbol(f, symbol), q)
        rhs = F.lp_norm(F.apply_symbol(f, lift) if s else f, p)
        return ScanRow(i, family.scales[i], lhs, rhs, lhs / rhs)

    threads = default_threads() if threads is None else max(1, int(threads))
    idx = range(len(family.scales))
    if threads == 1:
        rows = [job(i) for i in idx]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(job, idx))
    return ScanReport(n, float(alpha), float(s), float(p), float(q), family.kind.value,
                      grid.points_per_axis, grid.half_width, diagnostic, tuple(rows))
