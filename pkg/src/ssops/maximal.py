"""Dyadic shells, narrow cones and the maximal operators built from them.

Displacements ``u`` live on the lattice ``h Z^n`` and a lattice cell belongs
to a set when its centre ``u`` does.  The closed cone around ``u^v`` is
``{u : |u/|u| - u^v| <= 2^-rho}`` together with its apex ``u = 0``; the
apex sits in shell ``S_0`` by the boundary convention of
:func:`shell_index`.

All convolutions are periodic FFT convolutions; fields must vanish outside
``|x| <= L - 1`` for them to agree with convolution on ``R^n``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.fft as sfft
from scipy.spatial import ConvexHull, cKDTree

from .errors import DomainError, ResolutionError, SsopsError, ValidationError
from .fields import GridSpec, SampledField, lp_norm

MAX_RHO = 8


# ---------------------------------------------------------------------------
# shells


def shell_index(u) -> np.ndarray:
    """Dyadic index ``l`` with ``2^-l-1 <= 1 - |u| < 2^-l``; ``-1`` outside the open ball.

    ``u`` has shape ``(..., n)``.  ``u = 0`` (``1 - |u| = 1``) is put in ``S_0``.
    """
    u = np.asarray(u, dtype=float)
    d = 1.0 - np.sqrt(np.sum(u * u, axis=-1))
    return shell_index_from_gap(d)


def shell_index_from_gap(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    _, e = np.frexp(np.where(d > 0, d, 1.0))
    ell = np.maximum(-e, 0)
    return np.where(d > 0, ell, -1)


@dataclass(frozen=True)
class Shell:
    ell: int

    def __post_init__(self):
        if self.ell < 0:
            raise DomainError("shell index must be >= 0")

    @property
    def gap_range(self) -> tuple:
        """``[2^-l-1, 2^-l)`` for ``1 - |u|``."""
        return 2.0 ** (-self.ell - 1), 2.0 ** (-self.ell)

    @property
    def radius_range(self) -> tuple:
        lo, hi = self.gap_range
        return 1.0 - hi, 1.0 - lo

    def contains(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        d = 1.0 - np.sqrt(np.sum(u * u, axis=-1))
        lo, hi = self.gap_range
        # the centre (gap exactly 1) belongs to S_0
        return (lo <= d) & ((d < hi) | ((self.ell == 0) & (d == 1.0)))


# ---------------------------------------------------------------------------
# sphere grids


@dataclass(frozen=True, eq=False)
class SphereGrid:
    n: int
    rho: int
    directions: np.ndarray
    covering_radius: float
    multiplicity: int = 0

    @property
    def count(self) -> int:
        return len(self.directions)

    @property
    def cardinality_constant(self) -> float:
        """``count / 2^(rho (n-1))``."""
        return self.count / 2.0 ** (self.rho * (self.n - 1))

    @property
    def cone_width(self) -> float:
        return 2.0 ** (-self.rho)


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _hull_covering_radius(points: np.ndarray) -> float:
    """Exact chordal covering radius of a point set on S^2.

    Hull facets are the spherical Delaunay triangles; the farthest point of
    the sphere from the set is a facet's outward normal.
    """
    hull = ConvexHull(points)
    normals = hull.equations[:, :3]
    verts = points[hull.simplices[:, 0]]
    return float(np.max(np.linalg.norm(normals - verts, axis=1)))


def _random_directions(n: int, count: int, rng) -> np.ndarray:
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def build_sphere_grid(n: int, rho: int, *, samples: int = 100_000, seed: int = 0) -> SphereGrid:
    """Directions with chordal covering radius ``<= 2^-rho``.

    ``n = 2``: ``ceil(2 pi 2^rho)`` equally spaced angles.  ``n = 3``: the
    smallest Fibonacci set (grown by 5% steps) whose exact covering radius
    passes; both cases are re-verified with ``samples`` random directions.
    """
    if n not in (2, 3):
        raise DomainError("sphere grids are built for n = 2 and n = 3")
    if not 1 <= rho <= MAX_RHO:
        raise DomainError(f"rho must lie in [1, {MAX_RHO}]")
    eps = 2.0 ** (-rho)
    if n == 2:
        count = math.ceil(2.0 * math.pi * 2 ** rho)
        th = 2.0 * math.pi * np.arange(count) / count
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        cover = 2.0 * math.sin(math.pi / (2 * count))
    else:
        count = max(12, math.ceil(1.6 / eps ** 2))
        while True:
            dirs = fibonacci_sphere(count)
            cover = _hull_covering_radius(dirs)
            if cover <= eps:
                break
            count = math.ceil(count * 1.05)
    rng = np.random.default_rng(seed)
    probe = _random_directions(n, samples, rng)
    tree = cKDTree(dirs)
    dist, _ = tree.query(probe)
    worst = int(np.argmax(dist))
    if dist[worst] > eps:
        raise SsopsError(f"sphere grid leaves direction {probe[worst]} uncovered (distance {dist[worst]:.3g})")
    mult = tree.query_ball_point(probe[: min(samples, 20_000)], eps, return_length=True)
    return SphereGrid(n, rho, dirs, float(max(cover, dist.max())), int(np.max(mult)))


# ---------------------------------------------------------------------------
# cones and rectangles


def orthonormal_frame(e: np.ndarray) -> np.ndarray:
    """Rows: ``e`` followed by an orthonormal basis of its complement."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    n = e.size
    if n == 2:
        return np.array([e, [-e[1], e[0]]])
    k = int(np.argmin(np.abs(e)))
    a = np.zeros(n)
    a[k] = 1.0
    t1 = a - (a @ e) * e
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(e, t1)
    return np.array([e, t1, t2])


def in_cone(u, direction, rho: int) -> np.ndarray:
    """Closed narrow cone ``|u/|u| - u^v| <= 2^-rho``, apex included."""
    u = np.asarray(u, dtype=float)
    r = np.sqrt(np.sum(u * u, axis=-1))
    safe = np.where(r > 0, r, 1.0)[..., None]
    chord = np.linalg.norm(u / safe - np.asarray(direction), axis=-1)
    return (chord <= 2.0 ** (-rho)) | (r == 0)


@dataclass(frozen=True, eq=False)
class ConeRectanglePair:
    direction: np.ndarray
    rho: int
    ell: int
    frame: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise DomainError("cone direction must be a unit vector")
        if not 0 <= self.ell:
            raise DomainError("ell must be >= 0")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "frame", orthonormal_frame(d))

    @property
    def n(self) -> int:
        return self.direction.size

    @property
    def cone_half_width(self) -> float:
        return 2.0 ** (-self.rho)

    @property
    def axial_side(self) -> Fraction:
        return Fraction(5, 2 ** self.ell)

    @property
    def transverse_side(self) -> Fraction:
        return Fraction(5, 2 ** self.rho)

    @property
    def measure(self) -> Fraction:
        return self.axial_side * self.transverse_side ** (self.n - 1)

    @staticmethod
    def formula_measure(n: int, rho: int, ell: int) -> Fraction:
        """``5^n 2^-l 2^(-rho (n-1))``."""
        return Fraction(5 ** n, 2 ** (ell + rho * (n - 1)))

    def in_cone(self, u) -> np.ndarray:
        return in_cone(u, self.direction, self.rho)

    def in_rectangle(self, y) -> np.ndarray:
        """Membership of ``y`` in the rectangle centred on ``u^v``."""
        c = (np.asarray(y, dtype=float) - self.direction) @ self.frame.T
        ok = np.abs(c[..., 0]) <= 0.5 * float(self.axial_side)
        for k in range(1, self.n):
            ok &= np.abs(c[..., k]) <= 0.5 * float(self.transverse_side)
        return ok

    def sample_shell_cone(self, count: int, rng) -> np.ndarray:
        """Uniform samples of ``S_l`` intersected with the cone."""
        n = self.n
        a, b = Shell(self.ell).radius_range
        r = (a ** n + (b ** n - a ** n) * rng.uniform(size=count)) ** (1.0 / n)
        theta_max = 2.0 * math.asin(0.5 * self.cone_half_width)
        if n == 2:
            th = rng.uniform(-theta_max, theta_max, count)
            local = np.stack([np.cos(th), np.sin(th)], axis=1)
        else:
            cz = rng.uniform(math.cos(theta_max), 1.0, count)
            ph = rng.uniform(0.0, 2.0 * math.pi, count)
            sz = np.sqrt(1.0 - cz * cz)
            local = np.stack([cz, sz * np.cos(ph), sz * np.sin(ph)], axis=1)
        u = r[:, None] * (local @ self.frame)
        # guard against sampling exactly on the open end of the shell
        keep = Shell(self.ell).contains(u)
        return u[keep]


def shell_cone_inclusion_check(n: int, rho: int, samples: int = 100_000, *, ells=None,
                               grid: SphereGrid | None = None, seed: int = 0) -> int:
    """Count sampled points of ``S_l`` in a cone that miss its rectangle.

    ``samples`` points per shell, spread over random cone directions.
    """
    if grid is None:
        grid = build_sphere_grid(n, rho, seed=seed)
    rng = np.random.default_rng(seed + 1000 * rho)
    ells = range(rho + 1) if ells is None else ells
    bad = 0
    for ell in ells:
        if not 0 <= ell <= rho:
            raise DomainError("need 0 <= ell <= rho")
        per = np.bincount(rng.integers(0, grid.count, samples), minlength=grid.count)
        for v in np.nonzero(per)[0]:
            pair = ConeRectanglePair(grid.directions[v], rho, ell)
            u = pair.sample_shell_cone(int(per[v]), rng)
            inside = pair.in_cone(u)
            bad += int(np.count_nonzero(inside & ~pair.in_rectangle(u)))
    return bad


# ---------------------------------------------------------------------------
# lattice masks


@dataclass(frozen=True, eq=False)
class LatticeBall:
    """Lattice displacements ``k h`` inside the unit ball with their shells."""

    grid: GridSpec
    index: np.ndarray  # integer offsets, shape (M, n)
    points: np.ndarray  # k h
    ell: np.ndarray
    radius: np.ndarray

    @classmethod
    def build(cls, grid: GridSpec) -> "LatticeBall":
        h = grid.spacing
        kmax = int(math.ceil(1.0 / h))
        if 2 * kmax + 1 > grid.points_per_axis:
            raise ResolutionError("grid too small to hold the unit ball")
        ax = np.arange(-kmax, kmax + 1)
        idx = np.stack(np.meshgrid(*([ax] * grid.n), indexing="ij"), axis=-1).reshape(-1, grid.n)
        pts = idx * h
        r = np.linalg.norm(pts, axis=1)
        keep = r < 1.0
        idx, pts, r = idx[keep], pts[keep], r[keep]
        return cls(grid, idx, pts, shell_index_from_gap(1.0 - r), r)

    def dense(self, select, weights=None) -> np.ndarray:
        """Periodic kernel array with ``weights`` at the selected offsets."""
        out = np.zeros(self.grid.shape)
        w = 1.0 if weights is None else weights[select]
        out[tuple((self.index[select] % self.grid.points_per_axis).T)] = w
        return out

    def cone(self, direction, rho: int) -> np.ndarray:
        return in_cone(self.points, direction, rho)


def check_resolution(grid: GridSpec, rho: int) -> None:
    if grid.spacing > 2.0 ** (-rho - 2) * (1 + 1e-12):
        raise ResolutionError(
            f"grid spacing {grid.spacing:g} exceeds 2^-(rho+2) = {2.0 ** (-rho - 2):g}; "
            "refine the grid or lower rho")


def _require_nonnegative(f: SampledField) -> np.ndarray:
    v = f.values
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise DomainError("maximal operators act on nonnegative real fields")
        v = v.real
    if np.any(v < 0):
        raise DomainError("maximal operators act on nonnegative fields")
    return np.asarray(v, dtype=float)


def _stack(fields) -> tuple:
    fields = list(fields)
    if not fields:
        raise ValidationError("no fields given")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValidationError("fields live on different grids")
    return grid, np.stack([_require_nonnegative(f) for f in fields])


def _cone_weight(grid: GridSpec, rho: int, ell: int) -> float:
    """``h^n / (2^-l 2^(-rho (n-1)))``."""
    return grid.cell_volume / (2.0 ** (-ell) * 2.0 ** (-rho * (grid.n - 1)))


# ---------------------------------------------------------------------------
# operators


def directional_maximal(f: SampledField, sgrid: SphereGrid, v: int, x) -> float:
    """``M^v_rho f`` at the grid node with integer index ``x`` (direct lattice sum)."""
    vals = _require_nonnegative(f)
    grid = f.grid
    check_resolution(grid, sgrid.rho)
    ball = LatticeBall.build(grid)
    cone = ball.cone(sgrid.directions[v], sgrid.rho)
    N = grid.points_per_axis
    x = np.asarray(x)
    best = 0.0
    for ell in range(sgrid.rho + 1):
        sel = cone & (ball.ell == ell)
        if not sel.any():
            continue
        src = (x[None, :] - ball.index[sel]) % N
        total = vals[tuple(src.T)].sum()
        best = max(best, _cone_weight(grid, sgrid.rho, ell) * float(total))
    return best


@dataclass
class MaximalResult:
    """Batch output: ``M_rho f`` and, when requested, the shell sums of the natural kernel."""

    rho: int
    averaged: np.ndarray  # (B, ...) M_rho f
    partial: np.ndarray | None = None  # (B, ...) I^rho f
    shells: np.ndarray | None = None  # (B, rho+1, ...) Delta_l I f


def _fft_axes(grid: GridSpec) -> tuple:
    return tuple(range(1, grid.n + 1))


def averaged_maximal_batch(fields, sgrid: SphereGrid, *, alpha: float | None = None,
                           keep_shells: bool = False, workers: int | None = None) -> MaximalResult:
    """``M_rho f`` for several fields at once; optionally ``I^rho_alpha f`` too."""
    grid, vals = _stack(fields)
    rho = sgrid.rho
    check_resolution(grid, rho)
    if grid.n != sgrid.n:
        raise ValidationError("sphere grid and field dimension differ")
    ball = LatticeBall.build(grid)
    axes = _fft_axes(grid)
    shape = grid.shape
    fh = sfft.rfftn(vals, axes=axes, workers=workers)
    total = np.zeros(vals.shape)
    for u in sgrid.directions:
        cone = ball.cone(u, rho)
        best = np.zeros(vals.shape)
        for ell in range(rho + 1):
            sel = cone & (ball.ell == ell)
            if not sel.any():
                continue
            kh = sfft.rfftn(ball.dense(sel), workers=workers)
            conv = sfft.irfftn(fh * kh, s=shape, axes=axes, workers=workers)
            np.maximum(best, _cone_weight(grid, rho, ell) * conv, out=best)
        total += best
    total *= 2.0 ** (-rho * (grid.n - 1))
    np.maximum(total, 0.0, out=total)
    res = MaximalResult(rho, total)
    if alpha is not None:
        res.shells = _shell_sums(fh, ball, grid, alpha, rho, workers)
        res.partial = res.shells.sum(axis=1)
        if not keep_shells:
            res.shells = None
    return res


def _natural_weights(ball: LatticeBall, alpha: float, n: int) -> np.ndarray:
    return (1.0 - ball.radius ** 2) ** (-(1.0 - alpha / n))


def _shell_sums(fh, ball: LatticeBall, grid: GridSpec, alpha: float, rho: int, workers) -> np.ndarray:
    if not 0 < alpha < grid.n:
        raise DomainError("partial sums need 0 < alpha < n")
    axes = _fft_axes(grid)
    w = _natural_weights(ball, alpha, grid.n) * grid.cell_volume
    out = []
    for ell in range(rho + 1):
        kh = sfft.rfftn(ball.dense(ball.ell == ell, w), workers=workers)
        out.append(np.maximum(sfft.irfftn(fh * kh, s=grid.shape, axes=axes, workers=workers), 0.0))
    return np.stack(out, axis=1)


def averaged_maximal(f: SampledField, sgrid: SphereGrid, workers: int | None = None) -> SampledField:
    """``M_rho f = 2^(-rho (n-1)) sum_v M^v_rho f`` on the whole grid."""
    return SampledField(f.grid, averaged_maximal_batch([f], sgrid, workers=workers).averaged[0])


def partial_operator(f: SampledField, alpha: float, rho: int, workers: int | None = None) -> SampledField:
    """``I^rho_alpha f``: the natural kernel restricted to shells ``0..rho``."""
    grid, vals = _stack([f])
    if rho < 0:
        raise DomainError("rho must be >= 0")
    ball = LatticeBall.build(grid)
    fh = sfft.rfftn(vals, axes=_fft_axes(grid), workers=workers)
    return SampledField(grid, _shell_sums(fh, ball, grid, alpha, rho, workers).sum(axis=1)[0])


# ---------------------------------------------------------------------------
# Hedberg-type bound


def _check_hedberg_exponents(n: int, alpha: float, p: float, q: float) -> None:
    if not 1 < p < q < math.inf:
        raise DomainError("need 1 < p < q < inf")
    if abs(alpha / n - (1 / p - 1 / q)) > 1e-12:
        raise DomainError("need alpha/n = 1/p - 1/q")


def hedberg_ratio(partial: np.ndarray, averaged: np.ndarray, norm_p: float, p: float, q: float,
                  rel_floor: float = 1e-10) -> float:
    """``sup I f / ((M f)^(p/q) ||f||_p^(1-p/q))`` over nodes where ``M f`` is non-negligible."""
    if norm_p == 0.0:
        return 0.0
    mask = averaged > rel_floor * averaged.max()
    if not mask.any():
        return 0.0
    denom = averaged[mask] ** (p / q) * norm_p ** (1.0 - p / q)
    return float(np.max(partial[mask] / denom))


def hedberg_check(f: SampledField, alpha: float, p: float, q: float, rho: int,
                  sgrid: SphereGrid | None = None, workers: int | None = None) -> float:
    """Empirical constant in ``I^rho f <= C (M_rho f)^(p/q) ||f||_p^(1-p/q)``; 0 for ``f = 0``."""
    _check_hedberg_exponents(f.grid.n, alpha, p, q)
    vals = _require_nonnegative(f)
    if not vals.any():
        return 0.0
    if sgrid is None:
        sgrid = build_sphere_grid(f.grid.n, rho)
    res = averaged_maximal_batch([f], sgrid, alpha=alpha, workers=workers)
    return hedberg_ratio(res.partial[0], res.averaged[0], lp_norm(f, p), p, q)


@dataclass(frozen=True)
class ShellEstimates:
    """Fitted constants for the per-shell bounds and the split at ``sigma(x)``.

    ``maximal_constant``: ``sup Delta_l I f / (2^(-l a) M f)`` with ``a = alpha/n``.
    ``holder_constant``: ``sup Delta_l I f / (||f||_p 2^(-l (a - 1/p)))``.
    ``split_constant``: ``sup I f / (M f)^(p/q) ||f||_p^(1-p/q)`` rebuilt from the
    two branches (upper ``l >= sigma``, lower ``l < sigma``).
    """

    maximal_constant: float
    holder_constant: float
    split_constant: float


def shell_estimates(res: MaximalResult, norm_p: float, alpha: float, n: int, p: float, q: float,
                    rel_floor: float = 1e-10) -> list:
    """Per-field :class:`ShellEstimates` from a batch run made with ``keep_shells=True``."""
    if res.shells is None:
        raise ValidationError("run averaged_maximal_batch with keep_shells=True")
    a = alpha / n
    ells = np.arange(res.rho + 1)
    out = []
    for b in range(res.averaged.shape[0]):
        M = res.averaged[b]
        S = res.shells[b]
        mask = M > rel_floor * M.max()
        c1 = np.max(S[:, mask] / (2.0 ** (-ells * a)[:, None] * M[mask]))
        c2 = np.max(S[:, mask] / (norm_p[b] * 2.0 ** (-ells * (a - 1.0 / p)))[:, None])
        sigma = p * np.log2(M[mask] / norm_p[b])
        upper = ells[:, None] >= sigma[None, :]
        bound = np.where(upper, c1 * 2.0 ** (-ells[:, None] * a) * M[mask],
                         c2 * norm_p[b] * 2.0 ** (-ells[:, None] * (a - 1.0 / p)))
        split = np.max(bound.sum(axis=0) / (M[mask] ** (p / q) * norm_p[b] ** (1.0 - p / q)))
        out.append(ShellEstimates(float(c1), float(c2), float(split)))
    return out


def rectangle_domination_check(f: SampledField, sgrid: SphereGrid, v: int, x) -> float:
    """Largest ``shell-cone average - 5^n x rectangle average`` over ``l``; ``<= 0`` expected."""
    vals = _require_nonnegative(f)
    grid = f.grid
    ball = LatticeBall.build(grid)
    rho = sgrid.rho
    u = sgrid.directions[v]
    h = grid.spacing
    N = grid.points_per_axis
    x = np.asarray(x)
    kmax = int(math.ceil(2.0 / h))
    ax = np.arange(-kmax, kmax + 1)
    idx = np.stack(np.meshgrid(*([ax] * grid.n), indexing="ij"), axis=-1).reshape(-1, grid.n)
    worst = -math.inf
    cone = ball.cone(u, rho)
    for ell in range(rho + 1):
        pair = ConeRectanglePair(u, rho, ell)
        sel = cone & (ball.ell == ell)
        lhs = _cone_weight(grid, rho, ell) * vals[tuple(((x - ball.index[sel]) % N).T)].sum()
        # rectangle R centred at the origin: y + u^v lies in the rectangle around u^v
        rect = pair.in_rectangle(idx * h + u)
        cnt = vals[tuple(((x - idx[rect]) % N).T)].sum() * grid.cell_volume
        rhs = 5 ** grid.n * cnt / float(pair.measure)
        worst = max(worst, float(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# test family and reports


def maximal_test_family(grid: GridSpec, bumps: int = 5, seed: int = 0) -> dict:
    """Nonnegative fields supported (numerically) in ``|x| <= L - 1``.

    A Gaussian, a ball indicator and ``bumps`` random sums of Gaussian bumps.
    """
    from .fields import ball_indicator, gaussian

    reach = grid.half_width - 1.0
    out = {"gaussian": gaussian(grid, 0.25 * reach), "ball": ball_indicator(grid, 0.5 * reach)}
    rng = np.random.default_rng(seed)
    pts = grid.points()
    for b in range(bumps):
        k = int(rng.integers(2, 6))
        vals = np.zeros(grid.shape)
        for _ in range(k):
            c = _random_directions(grid.n, 1, rng)[0] * rng.uniform(0.0, 0.6 * reach)
            w = rng.uniform(0.05, 0.2) * reach
            amp = rng.uniform(0.2, 1.0)
            d2 = np.sum((pts - c) ** 2, axis=-1)
            vals += amp * np.exp(-np.pi * d2 / w ** 2)
        out[f"bumps{b}"] = SampledField(grid, vals)
    return out


@dataclass(frozen=True)
class MaximalRow:
    field: str
    rho: int
    violations: int
    norm_ratios: dict  # p -> ||M_rho f||_p / ||f||_p
    hedberg: float


def maximal_scan(fields: dict, rhos, alpha: float, p: float, q: float, norm_ps=(4 / 3, 2.0, 4.0),
                 violations: dict | None = None, workers: int | None = None) -> list:
    """Hedberg constants and ``M_rho`` norm ratios for each field and ``rho``."""
    names = list(fields)
    grid = fields[names[0]].grid
    _check_hedberg_exponents(grid.n, alpha, p, q)
    rows = []
    for rho in rhos:
        sg = build_sphere_grid(grid.n, rho)
        res = averaged_maximal_batch([fields[k] for k in names], sg, alpha=alpha, workers=workers)
        for b, name in enumerate(names):
            f = fields[name]
            ratios = {pp: lp_norm(res.averaged[b], pp, grid) / lp_norm(f, pp) for pp in norm_ps}
            hb = hedberg_ratio(res.partial[b], res.averaged[b], lp_norm(f, p), p, q)
            viol = -1 if violations is None else violations.get(rho, -1)
            rows.append(MaximalRow(name, rho, viol, ratios, hb))
    return rows


def maximal_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    ps = sorted({p for r in rows for p in r.norm_ratios})
    w.writerow(["field", "rho", "inclusion_violations"] + [f"M_norm_ratio_p{p:.6g}" for p in ps] + ["hedberg_constant"])
    for r in rows:
        w.writerow([r.field, r.rho, r.violations] + [repr(float(r.norm_ratios[p])) for p in ps] + [repr(r.hedberg)])
    return buf.getvalue()
