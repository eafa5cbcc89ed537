"""Complex Gamma and complex-order Bessel functions of the first kind.

``J_{mu + i nu}(rho)`` is computed from the Poisson integral

    J_v(rho) = (rho/2)^v / (sqrt(pi) Gamma(v + 1/2)) * int_{-1}^{1} e^{i rho s} (1 - s^2)^{v - 1/2} ds

for ``Re v > -1/2`` and extended to smaller real parts by the three-term
recurrence run downwards.  Two quadrature routes are used for the integral:

* real axis (small ``rho``): ``s = sin(phi)`` folded onto ``[0, pi/2]``,
  Gauss-Legendre panels, at least two per oscillation, geometrically graded
  towards the algebraic endpoint singularity;
* steepest-descent contour (large ``rho``): the segment ``[-1, 1]`` is
  deformed onto the vertical rays ``+-1 + i y``, where the integrand decays
  like ``e^{-rho y}`` and no longer oscillates.  This avoids the
  catastrophic cancellation the real-axis sum suffers when ``J_v(rho)`` is
  many orders of magnitude below the integrand.

Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import AccuracyError, DomainError, PoleError

__all__ = [
    "BesselOrder",
    "BesselValue",
    "gamma_complex",
    "gamma_reciprocal",
    "bessel_j",
    "normalized_bessel",
    "bessel_asymptotic",
    "bessel_half_integer",
    "remainder_envelope",
    "decay_envelope",
]

# Gauss order per panel; the coarse rule is only used for error estimation.
FINE_ORDER = 24
COARSE_ORDER = 12
# Number of geometric halvings towards an algebraic endpoint singularity.
GRADING_LEVELS = 42
# Gauss-Laguerre nodes on the contour route at the fine rule.
LAGUERRE_NODES = 64


def _is_pole(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def gamma_complex(z: complex) -> complex:
    """Gamma function for complex argument.

    Raises
    ------
    PoleError
        If ``z`` is a non-positive integer.
    """
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at z = {complex(z)}")
    return complex(special.gamma(complex(z)))


def gamma_reciprocal(z):
    """``1/Gamma(z)``, an entire function; exactly 0 at the poles of Gamma.

    Accepts scalars or arrays.
    """
    out = special.rgamma(np.asarray(z, dtype=complex))
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BesselOrder:
    """Complex order ``mu + i nu``."""

    mu: float
    nu: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.mu, self.nu)

    @classmethod
    def of(cls, v) -> "BesselOrder":
        if isinstance(v, BesselOrder):
            return v
        v = complex(v)
        return cls(v.real, v.imag)

    def shifted(self, k: int) -> "BesselOrder":
        return BesselOrder(self.mu + k, self.nu)


@dataclass(frozen=True)
class BesselValue:
    value: complex
    method: str  # "quadrature" | "recurrence" | "closed_form"
    est_abs_error: float


# --------------------------------------------------------------------------
# quadrature rules


@lru_cache(maxsize=None)
def _legendre(order: int):
    return special.roots_legendre(order)


def _panel_rule(edges: np.ndarray, order: int):
    xg, wg = _legendre(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    x = 0.5 * (b - a) * xg + 0.5 * (a + b)
    w = 0.5 * (b - a) * wg
    return x.ravel(), w.ravel()


def _graded_edges(top: float, levels: int = GRADING_LEVELS) -> np.ndarray:
    return top * 2.0 ** -np.arange(levels, -1, -1, dtype=float)


def _contour_switch(mu: float) -> float:
    # real-axis route is well conditioned below this argument
    return max(6.0, 0.7 * mu)


def _real_axis(v: complex, rho: np.ndarray, order: int) -> np.ndarray:
    """int_{-1}^{1} e^{i rho s}(1-s^2)^{v-1/2} ds on the real axis.

    Folded form: 2 int_0^{pi/2} cos(rho cos t) sin(t)^{2v} dt.
    """
    if rho.size == 0:
        return np.zeros(0, dtype=complex)
    npan = int(math.ceil(max(8.0, 2.0 * float(rho.max()) / math.pi)))
    h = 0.5 * math.pi / npan
    graded = _graded_edges(h)
    edges = np.concatenate([graded, h * np.arange(2, npan + 1)])
    t, w = _panel_rule(edges, order)
    weight = w * np.exp(2.0 * v * np.log(np.sin(t)))
    body = np.cos(np.multiply.outer(rho, np.cos(t))) @ weight
    eps = graded[0]
    tail = np.cos(rho) * eps ** (2.0 * v + 1.0) / (2.0 * v + 1.0)
    return 2.0 * (body + tail)


@lru_cache(maxsize=64)
def _laguerre(npts: int, a: float):
    return special.roots_genlaguerre(npts, a)


def _contour(v: complex, rho: np.ndarray, order: int) -> np.ndarray:
    """Same integral along the rays -1 + i y and 1 + i y, y = x / rho.

    For real order the weight x^a e^{-x} is integrated exactly by generalized
    Gauss-Laguerre nodes and the two rays are complex conjugates.  Complex
    order brings a log-oscillating factor x^{i Im v}, handled by graded panels.
    """
    if rho.size == 0:
        return np.zeros(0, dtype=complex)
    if v.imag == 0.0:
        a = v.real - 0.5
        x, w = _laguerre(LAGUERRE_NODES * order // FINE_ORDER, a)
        s = np.divide.outer(1.0 / rho, 1.0 / x)
        up = np.exp(0.5 * a * np.log(s * s + 4.0) + 1j * a * np.arctan2(2.0, s)) @ w
        return -2.0 * rho ** (-(a + 1.0)) * np.imag(np.exp(-1j * rho) * up) + 0j
    a = v - 0.5
    mu = v.real
    xmax = 80.0 + 4.0 * max(mu, 0.0)
    graded = _graded_edges(1.0)
    edges = np.concatenate([graded, 1.0 + 2.0 * np.arange(1, int(math.ceil((xmax - 1.0) / 2.0)) + 1)])
    x, w = _panel_rule(edges, order)
    base = np.log(w) + a * np.log(x) - x
    scaled = np.divide.outer(1.0 / rho, 1.0 / x)  # x / rho, shape (nrho, nx)
    up = np.exp(base + a * np.log(scaled + 2j)).sum(axis=1)
    down = np.exp(base + a * np.log(scaled - 2j)).sum(axis=1)
    eps = graded[0]
    tail = eps ** (a + 1.0) / (a + 1.0)
    up += tail * (2j) ** a
    down += tail * (-2j) ** a
    return 1j * rho ** (-(a + 1.0)) * (np.exp(-1j * rho) * up - np.exp(1j * rho) * down)


def _normalized_direct(v: complex, rho: np.ndarray, order: int) -> np.ndarray:
    """rho^{-v} J_v(rho) for Re v > -1/2 and rho >= 0 (vectorized)."""
    out = np.empty(rho.shape, dtype=complex)
    zero = rho == 0.0
    out[zero] = 2.0 ** (-v) * special.rgamma(v + 1.0)
    far = rho > _contour_switch(v.real)
    near = ~zero & ~far
    coef = 2.0 ** (-v) * special.rgamma(v + 0.5) / math.sqrt(math.pi)
    out[near] = coef * _real_axis(v, rho[near], order)
    out[far] = coef * _contour(v, rho[far], order)
    return out


def _normalized(v: complex, rho: np.ndarray, order: int) -> np.ndarray:
    if v.real > -0.5:
        return _normalized_direct(v, rho, order)
    # seeds with real part in (-1/2, 3/2]; N_{v-1} = 2 v N_v - rho^2 N_{v+1}
    k = int(math.floor(-0.5 - v.real)) + 1
    top = v + k
    lo = _normalized_direct(top, rho, order)
    hi = _normalized_direct(top + 1.0, rho, order)
    r2 = rho * rho
    w = top
    for _ in range(k):
        lo, hi = 2.0 * w * lo - r2 * hi, lo
        w = w - 1.0
    return lo


def _as_rho_array(rho):
    arr = np.asarray(rho, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite and >= 0")
    return arr


def normalized_bessel(order, rho, *, rule_order: int = FINE_ORDER):
    """``rho^{-(mu + i nu)} J_{mu + i nu}(rho)``.

    At ``rho = 0`` the removable singularity is filled with
    ``2^{-v} / Gamma(v + 1)``.  ``rho`` may be a scalar or an array; the
    return type follows it.
    """
    v = BesselOrder.of(order).value
    arr = _as_rho_array(rho)
    out = _normalized(v, arr.ravel(), rule_order).reshape(arr.shape)
    return complex(out) if out.ndim == 0 else out


def bessel_j(order, rho: float, *, method: str = "auto", tol: float = 1e-9) -> BesselValue:
    """Bessel function of the first kind of complex order.

    Parameters
    ----------
    order : BesselOrder or complex
    rho : float
        Argument, must be positive.
    method : {"auto", "closed_form"}
        ``"closed_form"`` is accepted for real half-integer orders only.
    tol : float
        Raise :class:`AccuracyError` if the refinement estimate exceeds
        ``tol * max(1, |J|)``.
    """
    o = BesselOrder.of(order)
    rho = float(rho)
    if not rho > 0.0 or not math.isfinite(rho):
        raise DomainError(f"bessel_j needs rho > 0, got {rho}")
    v = o.value
    if method == "closed_form":
        k = o.mu - 0.5
        if o.nu != 0.0 or k != math.floor(k):
            raise DomainError("closed form exists only for real half-integer orders")
        return BesselValue(bessel_half_integer(int(k), rho), "closed_form", 0.0)
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")

    arr = np.array([rho])
    fine = _normalized(v, arr, FINE_ORDER)[0]
    coarse = _normalized(v, arr, COARSE_ORDER)[0]
    scale = complex(np.exp(v * math.log(rho)))
    value = scale * fine
    err = abs(scale) * abs(fine - coarse) + 4.0 * np.finfo(float).eps * abs(value)
    if not math.isfinite(err) or err > tol * max(1.0, abs(value)):
        raise AccuracyError(f"J_{v}({rho}) did not converge: estimate {err:.3g}", achieved=err)
    kind = "quadrature" if o.mu > -0.5 else "recurrence"
    return BesselValue(complex(value), kind, float(err))


def bessel_asymptotic(order, rho):
    """Leading large-argument term sqrt(2/(pi rho)) cos(rho - pi v/2 - pi/4)."""
    v = BesselOrder.of(order).value
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    out = np.sqrt(2.0 / (math.pi * rho)) * np.cos(rho - 0.5 * math.pi * v - 0.25 * math.pi)
    return complex(out) if out.ndim == 0 else out


def bessel_half_integer(k: int, rho: float) -> float:
    """Elementary closed form of J_{k+1/2}(rho) for integer k >= -1."""
    if k < -1:
        raise DomainError("closed form implemented for k >= -1")
    x = float(rho)
    prev = math.cos(x) / x  # j_{-1}
    cur = math.sin(x) / x  # j_0
    if k == -1:
        cur = prev
    else:
        for m in range(k):
            prev, cur = cur, (2 * m + 1) / x * cur - prev
    return math.sqrt(2.0 * x / math.pi) * cur


def remainder_envelope(order, rho) -> float:
    """sup over rho of |J_v(rho) - leading term| * rho^{3/2} (for rho > 1)."""
    rho = np.asarray(rho, dtype=float)
    v = BesselOrder.of(order).value
    j = rho ** v * normalized_bessel(order, rho)
    return float(np.max(np.abs(j - bessel_asymptotic(order, rho)) * rho ** 1.5))


def decay_envelope(order, rho) -> float:
    """sup over rho of |rho^{-v} J_v(rho)| (1 + rho)^{1/2 + mu}."""
    o = BesselOrder.of(order)
    rho = np.asarray(rho, dtype=float)
    return float(np.max(np.abs(normalized_bessel(o, rho)) * (1.0 + rho) ** (0.5 + o.mu)))
