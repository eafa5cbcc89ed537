"""Sampled functions on periodic grids, spectral multipliers and norms.

Grid nodes sit at cell centres ``x_j = -L + (j + 1/2) h`` so no node lands
on a coordinate hyperplane through the origin, and the discrete transform
approximates ``f^(xi) = int f(x) exp(-2 pi i x.xi) dx`` at the lattice
frequencies ``xi = k / (2L)``.
"""

from __future__ import annotations

import functools
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import DomainError, ValidationError

MAGIC = b"SSOPFLD1"
_HEADER = struct.Struct("<8sIId8x")


@dataclass(frozen=True)
class GridSpec:
    n: int
    points_per_axis: int
    half_width: float = 4.0

    def __post_init__(self):
        N = self.points_per_axis
        if self.n not in (2, 3):
            raise DomainError("grids are supported for n = 2 and n = 3")
        if N < 2 or N & (N - 1):
            raise DomainError(f"points_per_axis must be a power of two, got {N}")
        if not self.half_width >= 2.0:
            raise DomainError("half_width must be >= 2 (kernel support is the unit ball)")

    @classmethod
    def default(cls, n: int) -> "GridSpec":
        return cls(n, 512 if n == 2 else 128, 4.0)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    def axis(self) -> np.ndarray:
        h = self.spacing
        return -self.half_width + (np.arange(self.points_per_axis) + 0.5) * h

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``shape + (n,)``."""
        ax = self.axis()
        return np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"), axis=-1)

    def radius(self) -> np.ndarray:
        ax2 = self.axis() ** 2
        r2 = ax2
        for _ in range(self.n - 1):
            r2 = r2[..., None] + ax2
        return np.sqrt(r2)

    def frequencies(self) -> np.ndarray:
        """Lattice frequencies (cycles per unit length) along one axis, FFT order."""
        return sfft.fftfreq(self.points_per_axis, d=self.spacing)

    @property
    def max_frequency_radius(self) -> float:
        return math.sqrt(self.n) * (self.points_per_axis // 2) / (2.0 * self.half_width)


@functools.lru_cache(maxsize=8)
def _lattice_radii(grid: GridSpec):
    """Unique lattice radii and the inverse map back to the FFT grid."""
    k = np.fft.fftfreq(grid.points_per_axis, d=1.0 / grid.points_per_axis).astype(np.int64)
    k2 = k * k
    K2 = k2
    for _ in range(grid.n - 1):
        K2 = K2[..., None] + k2
    uniq, inv = np.unique(K2.ravel(), return_inverse=True)
    radii = np.sqrt(uniq.astype(float)) / (2.0 * grid.half_width)
    return radii, inv.reshape(grid.shape)


def lattice_radii(grid: GridSpec) -> np.ndarray:
    """``|xi|`` at every lattice frequency, in FFT order."""
    radii, inv = _lattice_radii(grid)
    return radii[inv]


def symbol_on_grid(grid: GridSpec, m) -> np.ndarray:
    """Evaluate a radial multiplier at every lattice frequency (FFT order)."""
    radii, inv = _lattice_radii(grid)
    vals = np.asarray(m(radii), dtype=complex)
    return vals[inv]


def _phase(grid: GridSpec) -> np.ndarray:
    """exp(-2 pi i xi . x0) for the offset x0 of the first node."""
    x0 = -grid.half_width + 0.5 * grid.spacing
    ph = np.exp(-2j * np.pi * grid.frequencies() * x0)
    out = ph
    for _ in range(grid.n - 1):
        out = out[..., None] * ph
    return out


@dataclass(frozen=True, eq=False)
class SampledField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.size != self.grid.points_per_axis ** self.grid.n:
            raise ValidationError(f"expected {self.grid.points_per_axis ** self.grid.n} samples, got {v.size}")
        v = v.astype(complex if np.iscomplexobj(v) else float, copy=False).reshape(self.grid.shape)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SampledField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "SampledField":
        """Sample ``func(points)`` where ``points`` has shape ``grid.shape + (n,)``."""
        return cls(grid, np.asarray(func(grid.points())))

    @classmethod
    def from_radial(cls, grid: GridSpec, func) -> "SampledField":
        return cls(grid, np.asarray(func(grid.radius())))

    def __add__(self, other: "SampledField") -> "SampledField":
        _same_grid(self, other)
        return SampledField(self.grid, self.values + other.values)

    def __mul__(self, c) -> "SampledField":
        return SampledField(self.grid, self.values * c)

    __rmul__ = __mul__

    def real(self) -> "SampledField":
        return SampledField(self.grid, self.values.real.copy())

    def abs(self) -> "SampledField":
        return SampledField(self.grid, np.abs(self.values))

    def shift(self, steps) -> "SampledField":
        """Periodic translation by whole grid steps along each axis."""
        return SampledField(self.grid, np.roll(self.values, tuple(steps), axis=tuple(range(self.grid.n))))


def _same_grid(a: SampledField, b: SampledField) -> None:
    if a.grid != b.grid:
        raise ValidationError("fields live on different grids")


def gaussian(grid: GridSpec, width: float = 1.0, center=None) -> SampledField:
    """``exp(-pi |x - c|^2 / width^2)``."""
    c = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    pts = grid.points() - c
    return SampledField(grid, np.exp(-np.pi * np.sum(pts * pts, axis=-1) / width ** 2))


def ball_indicator(grid: GridSpec, radius: float = 1.0, center=None) -> SampledField:
    c = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    pts = grid.points() - c
    return SampledField(grid, (np.sum(pts * pts, axis=-1) < radius ** 2).astype(float))


def impulse(grid: GridSpec, index=None, mass: float = 1.0) -> SampledField:
    """A single node of total mass ``mass`` (value ``mass / h^n``)."""
    if index is None:
        index = (grid.points_per_axis // 2,) * grid.n
    v = np.zeros(grid.shape)
    v[tuple(index)] = mass / grid.cell_volume
    return SampledField(grid, v)


# ---------------------------------------------------------------------------
# transforms


def spectrum(f: SampledField, workers: int | None = None) -> np.ndarray:
    """Approximate continuous Fourier transform at the lattice frequencies."""
    g = f.grid
    return g.cell_volume * _phase(g) * sfft.fftn(f.values, workers=workers)


def from_spectrum(grid: GridSpec, fhat: np.ndarray, workers: int | None = None) -> SampledField:
    vals = sfft.ifftn(fhat / _phase(grid), workers=workers) / grid.cell_volume
    return SampledField(grid, vals)


def apply_symbol(f: SampledField, symbol: np.ndarray, workers: int | None = None) -> SampledField:
    """Multiply the transform of ``f`` by a precomputed lattice symbol."""
    out = sfft.ifftn(sfft.fftn(f.values, workers=workers) * symbol, workers=workers)
    return SampledField(f.grid, out)


def apply_multiplier(f: SampledField, m, workers: int | None = None) -> SampledField:
    """Periodic convolution realised as ``F^-1[ m(|xi|) F f ]``."""
    return apply_symbol(f, symbol_on_grid(f.grid, m), workers)


def bessel_potential_symbol(grid: GridSpec, s: float) -> np.ndarray:
    radii, inv = _lattice_radii(grid)
    return ((1.0 + radii * radii) ** (-0.5 * s))[inv]


def sobolev_lift(f: SampledField, s: float, workers: int | None = None) -> SampledField:
    """Field whose transform is ``f^(xi) (1 + |xi|^2)^(s/2)``."""
    if s < 0:
        raise DomainError("sobolev_lift needs s >= 0")
    if s == 0:
        return f
    return apply_symbol(f, bessel_potential_symbol(f.grid, -s), workers)


# ---------------------------------------------------------------------------
# norms


def lp_norm(f: SampledField | np.ndarray, p: float, grid: GridSpec | None = None) -> float:
    """Riemann-sum L^p norm; ``p = inf`` gives the max modulus."""
    if isinstance(f, SampledField):
        grid, vals = f.grid, f.values
    else:
        vals = np.asarray(f)
    if not p >= 1:
        raise DomainError(f"L^p norms need p >= 1, got {p}")
    a = np.abs(vals)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    dv = grid.cell_volume
    if p == 1:
        return float(dv * a.sum())
    if p == 2:
        return float(math.sqrt(dv * np.vdot(a, a).real))
    amax = float(a.max())
    if amax == 0.0:
        return 0.0
    return amax * float((dv * np.sum((a / amax) ** p)) ** (1.0 / p))


def sobolev_norm(f: SampledField, p: float, s: float, workers: int | None = None) -> float:
    return lp_norm(sobolev_lift(f, s, workers), p)


def spectral_l2_norm(f: SampledField, s: float = 0.0) -> float:
    """``(int (1 + |xi|^2)^s |f^(xi)|^2 dxi)^(1/2)`` as a lattice sum."""
    fh = spectrum(f)
    w = np.abs(fh) ** 2
    if s:
        w = w * (1.0 + lattice_radii(f.grid) ** 2) ** s
    return float(math.sqrt(w.sum() / (2.0 * f.grid.half_width) ** f.grid.n))


def l2_operator_norm(grid: GridSpec, m, s: float = 0.0) -> float:
    """Grid L^2 operator norm of ``f -> f * omega_s * K``: sup |omega_s^ m| over lattice radii."""
    radii, _ = _lattice_radii(grid)
    vals = np.abs(np.asarray(m(radii))) * (1.0 + radii * radii) ** (-0.5 * s)
    return float(vals.max())


# ---------------------------------------------------------------------------
# binary I/O


def write_field(path, f: SampledField) -> None:
    g = f.grid
    header = _HEADER.pack(MAGIC, g.n, g.points_per_axis, float(g.half_width))
    data = np.ascontiguousarray(f.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes(order="C"))


def read_field(path) -> SampledField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValidationError(f"{path}: truncated header")
    magic, n, N, L = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}")
    if raw[24:32] != bytes(8):
        raise ValidationError(f"{path}: reserved header bytes are not zero")
    grid = GridSpec(int(n), int(N), float(L))
    count = N ** n
    body = raw[_HEADER.size:]
    if len(body) != 16 * count:
        raise ValidationError(f"{path}: expected {16 * count} data bytes, found {len(body)}")
    vals = np.frombuffer(body, dtype="<c16").reshape(grid.shape).astype(complex)
    return SampledField(grid, vals)
