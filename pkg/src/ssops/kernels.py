"""Kernels singular on the unit sphere and their radial Fourier multipliers.

Fourier convention throughout: ``f^(xi) = int f(x) exp(-2 pi i x.xi) dx``,
so every multiplier is a function of ``|xi|`` in cycles per unit length.

Kernel families (``lam = lambda(alpha) = ((n+1)/2)(1 - alpha/n)``,
``delta = 1 - ((n+1)/(2n)) alpha``):

==================  ==========================================  ==========================
family              physical space, ``|x| < 1``                 Bessel index of multiplier
==================  ==========================================  ==========================
standard            pi^-lam / Gamma(1-lam) (1-|x|^2)^-lam          n/2 - lam
natural             (1-|x|^2)^-(1-alpha/n)                      n/2 - 1 + alpha/n
flat                pi^-delta / Gamma(1-delta) (1-|x|^2)^-delta    n/2 - delta
sweighted           as standard with lam -> lam + s             n/2 - lam - s
theta               (multiplier only)                           see :func:`theta_index`
bessel_potential    (multiplier only) (1 + |xi|^2)^(-s/2)
==================  ==========================================  ==========================

Bessel-type multipliers are ``|xi|^-v J_v(2 pi |xi|)``, evaluated as
``(2 pi)^v N_v(2 pi |xi|)`` with ``N_v(r) = r^-v J_v(r)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .specfun import gamma_complex, gamma_reciprocal, normalized_bessel


class Family(str, enum.Enum):
    STANDARD = "standard"
    NATURAL = "natural"
    FLAT = "flat"
    SWEIGHTED = "sweighted"
    BESSEL_POTENTIAL = "bessel_potential"
    THETA = "theta"


@dataclass(frozen=True)
class AlphaParams:
    """Order of fractional integration ``alpha`` in dimension ``n``."""

    alpha: complex
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def lam(self) -> complex:
        return 0.5 * (self.n + 1) * (1.0 - self.alpha / self.n)

    @property
    def delta(self) -> complex:
        return 1.0 - (self.n + 1) / (2.0 * self.n) * self.alpha


@dataclass(frozen=True)
class KernelSpec:
    family: Family
    params: AlphaParams
    s: float = 0.0
    z: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.s < 0:
            raise DomainError("smoothness weight s must be >= 0")
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if self.family is Family.THETA and not (0.0 < z.real < 1.0 or z in (0j, 1 + 0j)):
            raise DomainError("theta family needs 0 < Re z < 1 or z in {0, 1}")

    @classmethod
    def make(cls, family, alpha=0.0, n=2, s=0.0, z=0j) -> "KernelSpec":
        return cls(Family(family), AlphaParams(alpha, n), s, z)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def alpha(self) -> complex:
        return self.params.alpha


def theta_index(alpha: complex, s: float, n: int, z: complex) -> complex:
    """Bessel index of the analytic family at interpolation parameter ``z``."""
    return (n + 1) / (2.0 * n) * alpha - 0.5 + 0.5 * (n - 1) * z - s * (1.0 - z)


def critical_z(s: float, n: int) -> float:
    """The ``z`` at which the analytic family reduces to the standard kernel."""
    return 2.0 * s / (n - 1 + 2.0 * s)


def bessel_index(spec: KernelSpec) -> complex:
    p = spec.params
    n = p.n
    fam = spec.family
    if fam is Family.STANDARD:
        return 0.5 * n - p.lam
    if fam is Family.NATURAL:
        return 0.5 * n - 1.0 + p.alpha / n
    if fam is Family.FLAT:
        return 0.5 * n - p.delta
    if fam is Family.SWEIGHTED:
        return 0.5 * n - p.lam - spec.s
    if fam is Family.THETA:
        return theta_index(p.alpha, spec.s, n, spec.z)
    raise DomainError(f"{fam.value} is not a Bessel-type multiplier")


# ---------------------------------------------------------------------------
# physical space


def _physical_form(spec: KernelSpec):
    """(coefficient, exponent) with kernel = coef * (1-|x|^2)^-exponent."""
    p = spec.params
    fam = spec.family
    if fam is Family.STANDARD:
        if not p.lam.real < 1.0:
            raise DomainError("standard kernel is not locally integrable for Re lambda >= 1; use multiplier()")
        e = p.lam
    elif fam is Family.NATURAL:
        if not 0.0 < p.alpha.real < p.n:
            raise DomainError("natural kernel needs 0 < Re alpha < n")
        return 1.0 + 0j, 1.0 - p.alpha / p.n
    elif fam is Family.FLAT:
        if not 0.0 < p.alpha.real < 2.0 * p.n / (p.n + 1):
            raise DomainError("flat kernel needs 0 < Re alpha < 2n/(n+1)")
        e = p.delta
    elif fam is Family.SWEIGHTED:
        e = p.lam + spec.s
        if not e.real < 1.0:
            raise DomainError("s-weighted kernel needs Re lambda + s < 1; use multiplier()")
    else:
        raise DomainError(f"{fam.value} kernel has no closed physical-space form; use multiplier()")
    coef = math.pi ** (-e) * gamma_reciprocal(1.0 - e)
    return complex(coef), e


def kernel_value(spec: KernelSpec, x) -> np.ndarray | complex:
    """Evaluate the kernel at point(s) ``x`` (last axis has length ``n``).

    Zero outside the open unit ball.
    """
    coef, e = _physical_form(spec)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.n:
        raise DomainError(f"points must have last dimension {spec.n}")
    gap = 1.0 - np.sum(x * x, axis=-1)
    out = np.zeros(gap.shape, dtype=complex)
    inside = gap > 0.0
    out[inside] = coef * np.exp(-e * np.log(gap[inside]))
    return complex(out) if out.ndim == 0 else out


def radial_kernel_value(spec: KernelSpec, r) -> np.ndarray:
    """Kernel as a function of ``|x|``."""
    coef, e = _physical_form(spec)
    r = np.asarray(r, dtype=float)
    gap = 1.0 - r * r
    out = np.zeros(r.shape, dtype=complex)
    inside = gap > 0.0
    out[inside] = coef * np.exp(-e * np.log(gap[inside]))
    return out


# ---------------------------------------------------------------------------
# multipliers


@dataclass(frozen=True)
class RadialMultiplier:
    """Radial Fourier multiplier ``m(|xi|)``.

    ``decay_exponent`` is the asserted rate ``|m(rho)| <~ (1+rho)^-decay``.
    ``index`` is the Bessel index for Bessel-type profiles, else ``None``.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    decay_exponent: float
    index: complex | None = None
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if rho.size > 64:
            uniq, inv = np.unique(rho.ravel(), return_inverse=True)
            out = np.asarray(self.profile(uniq), dtype=complex)[inv].reshape(rho.shape)
        else:
            out = np.asarray(self.profile(rho.ravel()), dtype=complex).reshape(rho.shape)
        return complex(out) if out.ndim == 0 else out


def bessel_profile(index: complex, coef: complex = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """``rho -> coef * rho^-index J_index(2 pi rho)``, finite at 0."""
    index = complex(index)
    scale = coef * (2.0 * math.pi) ** index

    def profile(rho):
        return scale * normalized_bessel(index, 2.0 * math.pi * np.asarray(rho, dtype=float))

    return profile


def multiplier(spec: KernelSpec) -> RadialMultiplier:
    """Radial Fourier multiplier of ``spec``."""
    fam = spec.family
    if fam is Family.BESSEL_POTENTIAL:
        s = spec.s

        def profile(rho):
            return (1.0 + np.asarray(rho, dtype=float) ** 2) ** (-0.5 * s) + 0j

        return RadialMultiplier(profile, float(s), None, f"bessel_potential(s={s})")
    idx = bessel_index(spec)
    coef = 1.0
    if fam is Family.NATURAL:
        e = 1.0 - spec.alpha / spec.n
        coef = math.pi ** e * gamma_complex(1.0 - e)
    decay = float(idx.real) + 0.5
    return RadialMultiplier(bessel_profile(idx, coef), decay, idx, f"{fam.value}(alpha={spec.alpha}, n={spec.n})")


def multiplier_envelope(m: RadialMultiplier, lo: float = 10.0, hi: float = 1e4, windows: int = 40, per_window: int = 96):
    """Local maxima of ``|m|`` over unit-length windows at log-spaced centres.

    Bessel-type profiles ``J(2 pi rho)`` have period 1 in ``rho``, so each
    window holds at least one local maximum of ``|m|``.
    """
    centres = np.logspace(math.log10(lo), math.log10(hi), windows)
    offs = np.linspace(-0.5, 0.5, per_window)
    grid = centres[:, None] + offs[None, :]
    vals = np.abs(m(grid))
    k = np.argmax(vals, axis=1)
    peak = vals[np.arange(windows), k]
    # parabolic refinement of each sampled maximum
    inner = (k > 0) & (k < per_window - 1)
    idx = np.arange(windows)[inner]
    y0, y1, y2 = vals[idx, k[inner] - 1], vals[idx, k[inner]], vals[idx, k[inner] + 1]
    den = y0 - 2 * y1 + y2
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(den < 0, 0.5 * (y0 - y2) / den, 0.0)
    peak[inner] = y1 - 0.25 * (y0 - y2) * shift
    locs = grid[np.arange(windows), k]
    return locs, peak


def fit_loglog_slope(x, y) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)
    return float(slope)


def surface_measure_transform(n: int):
    """Fourier transform of the surface measure of the unit sphere in R^n."""
    base = bessel_profile(0.5 * n - 1.0)

    def profile(rho):
        return 2.0 * math.pi * base(rho)

    return profile


def surface_measure_constant(n: int, rho=None) -> float:
    """Least-squares constant c with m_standard(rho) = c * sigma^(rho) at alpha = n(n-1)/(n+1)."""
    if rho is None:
        rho = np.linspace(0.0, 20.0, 401)
    m = multiplier(KernelSpec.make(Family.STANDARD, n * (n - 1) / (n + 1), n))(rho)
    sig = surface_measure_transform(n)(rho)
    return float(np.real(np.vdot(sig, m) / np.vdot(sig, sig)))


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class ThetaEndpointReport:
    alpha: complex
    s: float
    n: int
    z_critical: float
    zero_vs_sweighted: float
    one_vs_flat: float
    critical_vs_standard: float
    # endpoint labels exchanged: z=0 against flat, z=1 against s-weighted
    swapped_zero_vs_flat: float
    swapped_one_vs_sweighted: float

    @property
    def max_discrepancy(self) -> float:
        return max(self.zero_vs_sweighted, self.one_vs_flat, self.critical_vs_standard)


def theta_endpoint_check(alpha: complex, s: float, n: int, rho=None) -> ThetaEndpointReport:
    """Compare the analytic family at z = 0, 1, 2s/(n-1+2s) with the named kernels.

    The index ``(n+1)alpha/(2n) - 1/2 + (n-1)z/2 - s(1-z)`` equals the
    s-weighted index at ``z = 0`` and the flat index at ``z = 1``; the
    opposite pairing is reported as well for comparison.
    """
    alpha = complex(alpha)
    if not 0.0 < alpha.real < 2.0 * n / (n + 1):
        raise DomainError("theta endpoint check needs 0 < Re alpha < 2n/(n+1)")
    if not s > 0:
        raise DomainError("theta endpoint check needs s > 0")
    if rho is None:
        rho = np.concatenate([[0.0], np.logspace(-2, 2, 100)])
    rho = np.asarray(rho, dtype=float)

    def prof(family, z=0j):
        return multiplier(KernelSpec.make(family, alpha, n, s, z))(rho)

    th0 = prof(Family.THETA, 0.0)
    th1 = prof(Family.THETA, 1.0)
    zc = critical_z(s, n)
    thc = prof(Family.THETA, zc)
    flat = prof(Family.FLAT)
    sw = prof(Family.SWEIGHTED)
    std = prof(Family.STANDARD)

    def gap(a, b):
        return float(np.max(np.abs(a - b)))

    return ThetaEndpointReport(
        alpha, s, n, zc,
        zero_vs_sweighted=gap(th0, sw),
        one_vs_flat=gap(th1, flat),
        critical_vs_standard=gap(thc, std),
        swapped_zero_vs_flat=gap(th0, flat),
        swapped_one_vs_sweighted=gap(th1, sw),
    )


@dataclass(frozen=True)
class DominationReport:
    kind: str
    sup_ratio: float
    inf_ratio: float
    imag_parts: tuple
    sup_by_imag: tuple
    fitted_growth: float  # c in sup ~ C e^{c |Im alpha|}


def _dominating_order(kind: str, alpha: complex, n: int) -> float:
    if kind == "flat":
        return 0.5 * (n + 1) * alpha.real
    return 0.5 * (n + 1) * alpha.real - 0.5 * (n - 1) * n


def domination_check(alpha: complex, n: int, samples: int = 100_000, *, kind: str = "flat",
                     imag_parts=None, seed: int = 0) -> DominationReport:
    """Sample the ratio of ``|kernel(x)|`` to the natural kernel that should dominate it.

    ``kind="flat"`` compares the flat kernel with ``natural^{(n+1) Re alpha / 2}``;
    ``kind="standard"`` compares the standard kernel with
    ``natural^{(n+1) Re alpha / 2 - (n-1) n / 2}`` (needs ``(n-1)n/(n+1) < Re alpha < n``).
    """
    alpha = complex(alpha)
    if kind == "flat":
        if not 0.0 < alpha.real < 2.0 * n / (n + 1):
            raise DomainError("flat domination needs 0 < Re alpha < 2n/(n+1)")
        fam = Family.FLAT
    elif kind == "standard":
        if not (n - 1) * n / (n + 1) < alpha.real < n:
            raise DomainError("standard domination needs (n-1)n/(n+1) < Re alpha < n")
        fam = Family.STANDARD
    else:
        raise DomainError(f"unknown domination kind {kind!r}")
    if imag_parts is None:
        imag_parts = np.linspace(0.0, 4.0, 9)
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, 1.0, samples)
    r = r[r > 0]
    beta = _dominating_order(kind, alpha, n)
    dom = radial_kernel_value(KernelSpec.make(Family.NATURAL, beta, n), r).real

    def sup_inf(a):
        k = np.abs(radial_kernel_value(KernelSpec.make(fam, a, n), r))
        ratio = k / dom
        return float(ratio.max()), float(ratio.min())

    sup, inf = sup_inf(alpha)
    sups = tuple(sup_inf(complex(alpha.real, t))[0] for t in imag_parts)
    ims = tuple(float(t) for t in imag_parts)
    growth = float(np.polyfit(ims, np.log(sups), 1)[0]) if len(ims) > 1 else float("nan")
    return DominationReport(kind, sup, inf, ims, sups, growth)


# ---------------------------------------------------------------------------
# sampling on grids (n = 2)


def _graded_rule(nodes: int, m: int = 3):
    """Gauss-Legendre on [0, 1] pulled through a map that flattens both ends."""
    u, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    um, vm = u ** m, (1.0 - u) ** m
    t = um / (um + vm)
    dt = m * (u ** (m - 1) * vm + um * (1.0 - u) ** (m - 1)) / (um + vm) ** 2
    return t, w * dt


def _wrap(a):
    return np.angle(np.exp(1j * a))


def cell_averaged_kernel(spec: KernelSpec, grid, nodes: int = 24, chunk: int = 4096) -> np.ndarray:
    """Exact cell averages of the kernel on a two-dimensional grid.

    Each cell integral is done in polar coordinates: the radial integral of
    ``(1-r^2)^-e r`` is closed form and the angular one uses graded Gauss
    rules between the corner directions and the unit-circle crossings, so
    the boundary singularity costs nothing.
    """
    if spec.n != 2 or grid.n != 2:
        raise DomainError("cell averaging is implemented for n = 2")
    coef, e = _physical_form(spec)
    h = grid.spacing
    ax = grid.axis()
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    out = np.zeros(grid.shape, dtype=complex)
    rmin = np.hypot(np.maximum(np.abs(X) - h / 2, 0.0), np.maximum(np.abs(Y) - h / 2, 0.0))
    rows, cols = np.nonzero(rmin < 1.0)
    tq, wq = _graded_rule(nodes)

    def antideriv(r):
        g = np.zeros(r.shape, dtype=complex)
        inside = r < 1.0
        g[inside] = -np.exp((1.0 - e) * np.log1p(-r[inside] ** 2)) / (2.0 * (1.0 - e))
        return g

    for start in range(0, rows.size, chunk):
        I = (rows[start:start + chunk], cols[start:start + chunk])
        xc, yc = X[I], Y[I]
        x0, x1, y0, y1 = xc - h / 2, xc + h / 2, yc - h / 2, yc + h / 2
        phic = np.arctan2(yc, xc)
        cx = np.stack([x0, x1, x1, x0], 1)
        cy = np.stack([y0, y0, y1, y1], 1)
        at_origin = np.hypot(cx, cy) < 1e-12 * h
        ca = _wrap(np.arctan2(cy, cx) - phic[:, None])
        touches = at_origin.any(1)
        lo = np.where(touches, -np.pi / 4, np.min(np.where(at_origin, np.inf, ca), 1))
        hi = np.where(touches, np.pi / 4, np.max(np.where(at_origin, -np.inf, ca), 1))
        cand = [np.where(at_origin, lo[:, None], ca)]
        for c, vertical, a0, a1 in ((x0, True, y0, y1), (x1, True, y0, y1), (y0, False, x0, x1), (y1, False, x0, x1)):
            t = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
            for o in (t, -t):
                ok = (c * c < 1.0) & (o >= a0) & (o <= a1)
                px, py = (c, o) if vertical else (o, c)
                cand.append(np.where(ok, _wrap(np.arctan2(py, px) - phic), lo)[:, None])
        bp = np.sort(np.clip(np.concatenate(cand, 1), lo[:, None], hi[:, None]), 1)
        bp = np.concatenate([lo[:, None], bp, hi[:, None]], 1)
        width = (bp[:, 1:] - bp[:, :-1])[:, :, None]
        th = bp[:, :-1, None] + width * tq + phic[:, None, None]
        wt = width * wq
        dx, dy = np.cos(th), np.sin(th)
        with np.errstate(divide="ignore", invalid="ignore"):
            tx = np.stack([x0[:, None, None] / dx, x1[:, None, None] / dx])
            ty = np.stack([y0[:, None, None] / dy, y1[:, None, None] / dy])
        tx = np.where(dx == 0, np.array([-np.inf, np.inf])[:, None, None, None], tx)
        ty = np.where(dy == 0, np.array([-np.inf, np.inf])[:, None, None, None], ty)
        tnear = np.maximum(tx.min(0), ty.min(0))
        tfar = np.minimum(tx.max(0), ty.max(0))
        a = np.clip(tnear, 0.0, 1.0)
        b = np.clip(np.maximum(tfar, a), 0.0, 1.0)
        out[I] = coef * np.sum(wt * (antideriv(b) - antideriv(a)), axis=(1, 2)) / (h * h)
    return out


@dataclass(frozen=True)
class TransformCheckReport:
    alpha: complex
    n: int
    points_per_axis: int
    half_width: float
    max_frequency: float
    max_abs_error: float
    max_rel_error: float  # max |D - m| / max |m| over the compared lattice
    zero_frequency_error: float


def transform_check(spec: KernelSpec, grid, max_frequency: float = 32.0) -> TransformCheckReport:
    """Compare the discrete transform of the cell-sampled kernel with ``multiplier(spec)``.

    Cell averaging multiplies the transform by ``prod sinc(h xi_i)``; that
    factor is divided out before comparing at lattice radii ``<= max_frequency``.
    """
    from .fields import SampledField, lattice_radii, spectrum

    if max_frequency > 0.5 / grid.spacing:
        raise DomainError("max_frequency exceeds the grid Nyquist frequency")
    vals = cell_averaged_kernel(spec, grid)
    fh = spectrum(SampledField(grid, vals))
    sn = np.sinc(grid.spacing * grid.frequencies())
    fh = fh / (sn[:, None] * sn[None, :])
    rad = lattice_radii(grid)
    sel = rad <= max_frequency
    mv = multiplier(spec)(rad[sel])
    diff = np.abs(fh[sel] - mv)
    return TransformCheckReport(
        spec.alpha, spec.n, grid.points_per_axis, grid.half_width, max_frequency,
        float(diff.max()), float(diff.max() / np.abs(mv).max()), float(abs(fh[0, 0] - mv[np.argmin(rad[sel])])),
    )
