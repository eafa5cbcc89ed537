"""Forced wave equation with zero data, solved mode by mode.

With ``f^(xi) = int f(x) exp(-2 pi i x.xi) dx`` the Laplacian acts as
``-(2 pi |xi|)^2``, so each mode obeys Duhamel's formula with angular
frequency ``k = 2 pi |xi|``::

    u^(xi, t) = int_0^t sin((t - s) k) / k  f^(xi, s) ds.

The time integral is a trapezoid sum over the forcing's own time lattice.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fields as F
from .errors import DomainError, ValidationError
from .fields import GridSpec, SampledField

TIME_TOL = 1e-9


class SeparableFrames(Sequence):
    """Frames ``g(x) phi(t_k)`` produced on demand."""

    def __init__(self, spatial: SampledField, temporal):
        self.spatial = spatial
        self.temporal = np.asarray(temporal)

    def __len__(self):
        return len(self.temporal)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        return self.spatial * self.temporal[k]


@dataclass(frozen=True, eq=False)
class WaveForcing:
    grid: GridSpec
    times: np.ndarray
    frames: Sequence

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("need at least two forcing times")
        if len(self.frames) != t.size:
            raise ValidationError("one frame per time is required")
        if t[0] < 0:
            raise ValidationError("forcing times must be >= 0")
        steps = np.diff(t)
        if not np.all(steps > 0):
            raise ValidationError("forcing times must increase")
        if np.max(np.abs(steps - steps[0])) > TIME_TOL * max(1.0, t[-1]):
            raise ValidationError("forcing times must be uniformly spaced")
        object.__setattr__(self, "times", t)
        if isinstance(self.frames, SeparableFrames):
            if self.frames.spatial.grid != self.grid:
                raise ValidationError("frame grid differs from forcing grid")
        else:
            for f in self.frames:
                if f.grid != self.grid:
                    raise ValidationError("frame grid differs from forcing grid")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @classmethod
    def separable(cls, spatial: SampledField, profile, times) -> "WaveForcing":
        """``f(x, t) = g(x) phi(t)`` with ``phi`` a callable or an array of samples."""
        times = np.asarray(times, dtype=float)
        vals = profile(times) if callable(profile) else np.asarray(profile)
        return cls(spatial.grid, times, SeparableFrames(spatial, vals))

    @classmethod
    def uniform(cls, grid: GridSpec, dt: float, count: int, frames) -> "WaveForcing":
        return cls(grid, dt * np.arange(count), frames)

    def scaled(self, c: float) -> "WaveForcing":
        if isinstance(self.frames, SeparableFrames):
            return WaveForcing(self.grid, self.times, SeparableFrames(self.frames.spatial, c * self.frames.temporal))
        return WaveForcing(self.grid, self.times, [c * f for f in self.frames])


def angular_frequencies(grid: GridSpec) -> tuple:
    """Unique ``k = 2 pi |xi|`` on the lattice and the inverse map (FFT order)."""
    radii, inv = F._lattice_radii(grid)
    return 2.0 * math.pi * radii, inv


def max_stable_dt(grid: GridSpec) -> float:
    """``pi / (4 k_max)`` with ``k_max`` the largest lattice angular frequency."""
    k, _ = angular_frequencies(grid)
    return math.pi / (4.0 * k.max())


def _time_index(forcing: WaveForcing, t: float) -> int:
    times = forcing.times
    m = int(round((t - times[0]) / forcing.dt))
    if m < 0 or m >= times.size or abs(times[m] - t) > TIME_TOL * max(1.0, abs(t)):
        raise DomainError(f"t = {t} is not on the forcing time lattice; interpolation is refused")
    return m


def _check_dt(forcing: WaveForcing) -> None:
    lim = max_stable_dt(forcing.grid)
    if forcing.dt > lim * (1 + 1e-12):
        raise DomainError(f"dt = {forcing.dt:g} exceeds pi/(4 k_max) = {lim:g}; refine the time step")


def _weights(m: int, dt: float) -> np.ndarray:
    w = np.full(m + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    if m == 0:
        w[:] = 0.0
    return w


def _sinc_kernel(tau: float, k: np.ndarray) -> np.ndarray:
    """``sin(tau k)/k`` with the limit ``tau`` at ``k = 0``."""
    out = np.empty_like(k)
    nz = k > 0
    out[nz] = np.sin(tau * k[nz]) / k[nz]
    out[~nz] = tau
    return out


def _spectral_state(forcing: WaveForcing, t: float, workers=None):
    """``(u^, d_t u^)`` at lattice time ``t`` (FFT-ordered arrays, continuous normalisation)."""
    _check_dt(forcing)
    m = _time_index(forcing, t)
    k, inv = angular_frequencies(forcing.grid)
    s = forcing.times[: m + 1]
    w = _weights(m, forcing.dt)
    t = forcing.times[m]
    frames = forcing.frames
    if isinstance(frames, SeparableFrames):
        phi = frames.temporal[: m + 1]
        a = np.zeros(k.shape, dtype=complex)
        b = np.zeros(k.shape, dtype=complex)
        for j in range(m + 1):
            if w[j] == 0.0 or phi[j] == 0:
                continue
            a += w[j] * phi[j] * _sinc_kernel(t - s[j], k)
            b += w[j] * phi[j] * np.cos((t - s[j]) * k)
        gh = F.spectrum(frames.spatial, workers)
        return a[inv] * gh, b[inv] * gh
    uh = np.zeros(forcing.grid.shape, dtype=complex)
    vh = np.zeros(forcing.grid.shape, dtype=complex)
    for j in range(m + 1):
        if w[j] == 0.0:
            continue
        fh = F.spectrum(frames[j], workers)
        uh += (w[j] * _sinc_kernel(t - s[j], k))[inv] * fh
        vh += (w[j] * np.cos((t - s[j]) * k))[inv] * fh
    return uh, vh


def solve_wave(forcing: WaveForcing, t: float, workers=None) -> SampledField:
    """``u(., t)`` for zero initial data; ``t`` must lie on the forcing time lattice."""
    uh, _ = _spectral_state(forcing, t, workers)
    return F.from_spectrum(forcing.grid, uh, workers)


def solve_wave_velocity(forcing: WaveForcing, t: float, workers=None) -> SampledField:
    """``d_t u(., t)`` from the differentiated Duhamel sum."""
    _, vh = _spectral_state(forcing, t, workers)
    return F.from_spectrum(forcing.grid, vh, workers)


def energy(forcing: WaveForcing, t: float, workers=None) -> float:
    """``||d_t u||_2^2 + ||grad u||_2^2`` via Plancherel on the lattice."""
    uh, vh = _spectral_state(forcing, t, workers)
    k, inv = angular_frequencies(forcing.grid)
    dens = np.abs(vh) ** 2 + (k[inv] * np.abs(uh)) ** 2
    return float(dens.sum() / (2.0 * forcing.grid.half_width) ** forcing.grid.n)


def static_forcing_solution(g: SampledField, t: float) -> SampledField:
    """Exact ``u`` for ``f(x, t) = g(x)``: ``u^ = g^ (1 - cos(t k)) / k^2``, ``g^(0) t^2 / 2`` at 0."""
    k, inv = angular_frequencies(g.grid)
    fac = np.empty_like(k)
    nz = k > 0
    fac[nz] = (1.0 - np.cos(t * k[nz])) / k[nz] ** 2
    fac[~nz] = 0.5 * t * t
    return F.from_spectrum(g.grid, fac[inv] * F.spectrum(g))


def duhamel_kernel_identity(grid: GridSpec, r: float) -> float:
    """Max deviation of ``sin(r k)/k`` from ``(r/2) m(r |xi|)`` over the lattice.

    ``m`` is the standard multiplier at ``alpha = 2n/(n+1)``, i.e.
    ``sin(2 pi rho)/(pi rho)``; the factor ``1/2`` comes from ``k = 2 pi |xi|``.
    """
    from .kernels import KernelSpec, multiplier

    n = grid.n
    m = multiplier(KernelSpec.make("standard", 2 * n / (n + 1), n))
    radii, _ = F._lattice_radii(grid)
    lhs = _sinc_kernel(r, 2.0 * math.pi * radii)
    rhs = 0.5 * r * m(r * radii).real
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# a priori estimate


def duhamel_exponent(n: int) -> float:
    """``(n-1)/(n+1)``, the power of ``r`` in the time weight."""
    return (n - 1) / (n + 1)


def _check_admissible(n: int, p: float, q: float, s: float) -> None:
    from .regions import RegionQuery, theorem_one

    alpha = 2 * n / (n + 1)
    try:
        verdict = theorem_one(RegionQuery(n, s, alpha, p, q))
    except DomainError as exc:
        raise DomainError(f"estimate hypotheses fail: {exc}") from exc
    if not verdict.admissible:
        bad = "; ".join(c.describe() for c in verdict.violated)
        raise DomainError(f"(p, q, s) inadmissible at alpha = 2n/(n+1): {bad}")


def weighted_time_integral(values: np.ndarray, dt: float, t: float, n: int, nodes: int = 1024) -> float:
    """``int_0^t F(t - r) r^-(n-1)/(n+1) dr`` from lattice samples ``F(s_j)``, ``s_j = j dt``.

    Substituting ``r = t u^((n+1)/2)`` cancels the endpoint singularity; the
    resulting smooth integral is a trapezoid sum over ``u`` on ``nodes`` intervals
    (the graded mesh ``r_j ~ j^((n+1)/2)``), with ``F`` interpolated linearly.
    """
    m = 0.5 * (n + 1)
    beta = duhamel_exponent(n)
    u = np.linspace(0.0, 1.0, nodes + 1)
    r = t * u ** m
    s = np.asarray(dt * np.arange(len(values)))
    Fv = np.interp(t - r, s, np.asarray(values, dtype=float))
    w = np.full(nodes + 1, 1.0 / nodes)
    w[0] = w[-1] = 0.5 / nodes
    return float(m * t ** (1.0 - beta) * np.sum(w * Fv))


def duhamel_estimate_check(forcing: WaveForcing, t: float, p: float, q: float, s: float, workers=None) -> float:
    """``||u(., t)||_q / int_0^t ||f(., t - r)||_{L^p_s} r^-(n-1)/(n+1) dr`` (0 for zero forcing)."""
    n = forcing.grid.n
    _check_admissible(n, p, q, s)
    m = _time_index(forcing, t)
    frames = forcing.frames
    if isinstance(frames, SeparableFrames):
        base = F.sobolev_norm(frames.spatial, p, s, workers)
        norms = np.abs(frames.temporal[: m + 1]) * base
    else:
        norms = np.array([F.sobolev_norm(frames[j], p, s, workers) for j in range(m + 1)])
    rhs = weighted_time_integral(norms, forcing.dt, forcing.times[m] - forcing.times[0], n)
    if rhs == 0.0:
        return 0.0
    u = solve_wave(forcing, t, workers)
    return F.lp_norm(u, q) / rhs


# ---------------------------------------------------------------------------
# forcing files


def write_forcing(directory, forcing: WaveForcing, pattern: str = "frame_{:05d}.ssf") -> Path:
    """Write frames plus ``manifest.json`` holding ``{dt, count, t0, pattern}``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for j in range(len(forcing.frames)):
        F.write_field(d / pattern.format(j), forcing.frames[j])
    manifest = {"dt": forcing.dt, "count": len(forcing.frames), "t0": float(forcing.times[0]), "pattern": pattern}
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return path


def read_forcing(manifest_path) -> WaveForcing:
    path = Path(manifest_path)
    if path.is_dir():
        path = path / "manifest.json"
    try:
        man = json.loads(path.read_text())
        dt, count = float(man["dt"]), int(man["count"])
    except (OSError, ValueError, KeyError) as exc:
        raise ValidationError(f"bad forcing manifest {path}: {exc}") from exc
    pattern = man.get("pattern", "frame_{:05d}.ssf")
    frames = [F.read_field(path.parent / pattern.format(j)) for j in range(count)]
    t0 = float(man.get("t0", 0.0))
    return WaveForcing(frames[0].grid, t0 + dt * np.arange(count), frames)
