"""Admissible exponent regions for the spherical fractional integrals.

Every predicate works in exact rational arithmetic when its inputs are
``int`` or ``fractions.Fraction`` and falls back to floats otherwise.
Equalities are tested exactly for rationals and to ``EQ_TOL`` for floats;
strict inequalities are strict, with near misses flagged as ``boundary``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import DomainError

Number = Union[int, float, Fraction]
EQ_TOL = 1e-12


def _exact(x) -> bool:
    return isinstance(x, Rational)


def _as_number(x) -> Number:
    if isinstance(x, bool):
        raise DomainError("boolean is not an exponent")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _close(a, b) -> bool:
    if _exact(a) and _exact(b):
        return a == b
    return abs(float(a) - float(b)) <= EQ_TOL


@dataclass(frozen=True)
class RegionQuery:
    """Exponent data ``(n, s, alpha, p, q)``; ``q=None`` means ``q = p``."""

    n: int
    s: Number
    alpha: Number
    p: Number
    q: Number | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        for name in ("s", "alpha", "p"):
            object.__setattr__(self, name, _as_number(getattr(self, name)))
        if self.q is not None:
            object.__setattr__(self, "q", _as_number(self.q))
        if self.s < 0:
            raise DomainError("s must be >= 0")
        for name, v in (("p", self.p), ("q", self.q_eff)):
            if not v > 1:
                raise DomainError(f"{name} must exceed 1 (got {v})")

    @classmethod
    def from_inverse(cls, n, s, alpha, inv_p, inv_q=None) -> "RegionQuery":
        inv_p = _as_number(inv_p)
        p = 1 / inv_p
        q = None if inv_q is None else 1 / _as_number(inv_q)
        return cls(n, s, alpha, p, q)

    @property
    def q_eff(self) -> Number:
        return self.p if self.q is None else self.q

    @property
    def inv_p(self) -> Number:
        return 1 / self.p

    @property
    def inv_q(self) -> Number:
        return 1 / self.q_eff

    @property
    def a(self) -> Number:
        """``alpha / n``."""
        return self.alpha / self.n

    def dual(self) -> "RegionQuery":
        """Reflection ``(1/p, 1/q) -> (1 - 1/q, 1 - 1/p)``."""
        return RegionQuery.from_inverse(self.n, self.s, self.alpha, 1 - self.inv_q, 1 - self.inv_p)


@dataclass(frozen=True)
class Constraint:
    """``lower (<|<=) value (<|<=) upper``, or ``value == lower`` when ``equality``."""

    name: str
    value: Number
    lower: Number | None = None
    upper: Number | None = None
    strict: bool = True
    equality: bool = False
    satisfied: bool = field(init=False)
    boundary: bool = field(init=False)

    def __post_init__(self):
        v = self.value
        if self.equality:
            ok = _close(v, self.lower)
            edge = False
        else:
            ok = True
            edge = False
            for bound, below in ((self.lower, True), (self.upper, False)):
                if bound is None:
                    continue
                hit = _close(v, bound)
                inside = (bound < v) if below else (v < bound)
                if self.strict:
                    ok &= inside and not hit
                    edge |= hit
                else:
                    ok &= inside or hit
        object.__setattr__(self, "satisfied", bool(ok))
        object.__setattr__(self, "boundary", bool(edge))

    def describe(self) -> str:
        rel = "<" if self.strict else "<="
        if self.equality:
            return f"{self.name}: {self.value} == {self.lower}"
        lo = f"{self.lower} {rel} " if self.lower is not None else ""
        hi = f" {rel} {self.upper}" if self.upper is not None else ""
        return f"{self.name}: {lo}{self.value}{hi}"


@dataclass(frozen=True)
class RegionVerdict:
    rule: str
    admissible: bool
    binding: tuple

    @classmethod
    def of(cls, rule: str, *constraints: Constraint) -> "RegionVerdict":
        return cls(rule, all(c.satisfied for c in constraints), tuple(constraints))

    @property
    def violated(self) -> list:
        return [c for c in self.binding if not c.satisfied]

    @property
    def boundary(self) -> bool:
        return any(c.boundary for c in self.binding)

    def __bool__(self) -> bool:
        return self.admissible


# ---------------------------------------------------------------------------
# bounds


def theorem_one_bounds(n: int, s: Number, a: Number):
    """Lower/upper bound on ``1/p`` at ``alpha/n = a``."""
    d = 2 * n - 2 + 4 * s
    lower = (n - 1) / _q(d) + (4 * s + n - 1) / _q(d) * a
    upper = (n - 1 + 4 * s) / _q(d) + (n - 1) / _q(d) * a
    return lower, upper


def theorem_two_bounds(n: int, s: Number, a: Number):
    d = 2 * n - 2 + 4 * s
    lower = (n - 1) / _q(d) - (n + 1) / _q(d) * a
    upper = (n - 1 + 4 * s) / _q(d) + (n + 1) / _q(d) * a
    return lower, upper


def _q(x):
    """Promote to Fraction when exact so integer division stays rational."""
    return Fraction(x) if _exact(x) else x


def _gap_constraint(query: RegionQuery, target) -> Constraint:
    return Constraint("1/p - 1/q", query.inv_p - query.inv_q, lower=target, equality=True)


def _require_open_alpha(query: RegionQuery) -> None:
    if not 0 < query.alpha < query.n:
        raise DomainError(f"hypothesis 0 < alpha < n violated (alpha={query.alpha}, n={query.n})")


def _require_positive_s(query: RegionQuery) -> None:
    if not query.s > 0:
        raise DomainError(f"hypothesis s > 0 violated (s={query.s})")


def theorem_one(query: RegionQuery) -> RegionVerdict:
    """L^p_s -> L^q bound for the standard kernel."""
    _require_open_alpha(query)
    _require_positive_s(query)
    lo, hi = theorem_one_bounds(query.n, query.s, query.a)
    return RegionVerdict.of(
        "theorem_one",
        _gap_constraint(query, query.a),
        Constraint("1/p", query.inv_p, lo, hi, strict=True),
    )


def alpha_critical(n: int) -> Fraction:
    """``((n-1)/(n+1)) n``, where the standard kernel becomes a sphere measure."""
    return Fraction((n - 1) * n, n + 1)


def theorem_two(query: RegionQuery) -> RegionVerdict:
    """L^p_s -> L^p bound for ``0 < alpha < ((n-1)/(n+1)) n``."""
    if not 0 < query.alpha:
        raise DomainError("hypothesis alpha > 0 violated")
    if not query.alpha < alpha_critical(query.n):
        raise DomainError("alpha >= ((n-1)/(n+1)) n: use remark_one")
    _require_positive_s(query)
    if query.q is not None and not _close(query.p, query.q):
        raise DomainError("theorem_two is an L^p -> L^p statement (needs p = q)")
    lo, hi = theorem_two_bounds(query.n, query.s, query.a)
    return RegionVerdict.of("theorem_two", Constraint("1/p", query.inv_p, lo, hi, strict=True))


def remark_one(query: RegionQuery) -> RegionVerdict:
    """L^p -> L^p for every ``1 < p < inf`` once ``alpha >= ((n-1)/(n+1)) n``."""
    if query.q is not None and not _close(query.p, query.q):
        raise DomainError("remark_one is an L^p -> L^p statement (needs p = q)")
    crit = alpha_critical(query.n)
    lo = crit if _exact(query.alpha) else float(crit)
    return RegionVerdict.of(
        "remark_one",
        Constraint("alpha >= critical", query.alpha, lower=lo, strict=False),
        Constraint("alpha < n", query.alpha, upper=query.n, strict=True),
        Constraint("1/p", query.inv_p, 0, 1, strict=True),
    )


def lemma_one(query: RegionQuery) -> RegionVerdict:
    """Natural kernel: ``alpha/n >= 1/p - 1/q``."""
    _require_open_alpha(query)
    if not query.p <= query.q_eff:
        raise DomainError("lemma_one needs p <= q")
    return RegionVerdict.of(
        "lemma_one",
        Constraint("1/p - 1/q", query.inv_p - query.inv_q, upper=query.a, strict=False),
    )


def lemma_two_bounds(n: int, s: Number, a: Number, branch: str):
    """``(gap, lower, upper)``: ``1/p - 1/q = gap`` and ``lower <= 1/p <= upper``."""
    half = Fraction(1, 2) if _exact(s) and _exact(a) else 0.5
    if branch == "low":
        if s > half:
            raise DomainError("low branch needs s <= 1/2")
        return (1 - s) * a, half + a * (half - s), half + a / 2
    if branch == "high":
        if s < half:
            raise DomainError("high branch needs s >= 1/2")
        return a / 2, half, half + a / 2
    raise DomainError(f"unknown branch {branch!r}")


def lemma_two(query: RegionQuery, branch: str | None = None) -> RegionVerdict:
    """L^p -> L^q bound for ``f * omega_s * (s-weighted kernel)``.

    ``branch`` forces ``"low"`` (``s <= 1/2``) or ``"high"`` (``s >= 1/2``);
    by default it is chosen from ``s``.
    """
    _require_open_alpha(query)
    if branch is None:
        branch = "low" if query.s <= Fraction(1, 2) else "high"
    gap, lo, hi = lemma_two_bounds(query.n, query.s, query.a, branch)
    return RegionVerdict.of(
        f"lemma_two[{branch}]",
        _gap_constraint(query, gap),
        Constraint("1/p", query.inv_p, lo, hi, strict=False),
    )


def lemma_two_branch_gap(n: int, alpha: Number) -> tuple:
    """Both branches' (gap, lower, upper) at ``s = 1/2``; they must coincide."""
    a = _as_number(alpha) / n
    half = Fraction(1, 2)
    return lemma_two_bounds(n, half, a, "low"), lemma_two_bounds(n, half, a, "high")


# ---------------------------------------------------------------------------
# tabulation and emission


@dataclass(frozen=True)
class PolygonRow:
    alpha_over_n: Number
    inv_p_lower: Number
    inv_p_upper: Number
    s: Number
    n: int


def region_polygon(n: int, s: Number, alpha_steps: int, extra_alpha=()) -> list:
    """Theorem-one ``1/p`` bounds at ``alpha/n = k/(alpha_steps-1)``, endpoints included.

    The endpoints are the limits of the open range ``0 < alpha < n``.
    ``extra_alpha`` adds rows at further values of ``alpha``.
    """
    if alpha_steps < 2:
        raise DomainError("alpha_steps must be >= 2")
    s = _as_number(s)
    grid = {Fraction(k, alpha_steps - 1) for k in range(alpha_steps)}
    grid |= {_as_number(a) / n for a in extra_alpha}
    if not _exact(s):
        grid = {float(a) for a in grid}
    rows = []
    for a in sorted(grid):
        lo, hi = theorem_one_bounds(n, s, a)
        rows.append(PolygonRow(a, lo, hi, s, n))
    return rows


def _fmt(x) -> str:
    return repr(float(x))


def polygon_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha_over_n", "inv_p_lower", "inv_p_upper", "s", "n"])
    for r in rows:
        w.writerow([_fmt(r.alpha_over_n), _fmt(r.inv_p_lower), _fmt(r.inv_p_upper), _fmt(r.s), r.n])
    return buf.getvalue()


def region_svg(n: int, s: Number, alpha: Number | None = None, size: int = 400) -> str:
    """The ``(1/p, 1/q)`` square with the theorem-one region for the given ``s``.

    The region over all ``0 < alpha < n`` is the triangle spanned by the
    ``alpha -> 0`` segment on the diagonal and the corner ``(1, 0)``; a given
    ``alpha`` is drawn as its admissible segment on ``1/q = 1/p - alpha/n``.
    """
    pad = 40
    scale = size - 2 * pad

    def xy(x, y):
        return pad + float(x) * scale, size - pad - float(y) * scale

    def pt(x, y):
        return "{:.3f},{:.3f}".format(*xy(x, y))

    def line(p0, p1, style):
        (x1, y1), (x2, y2) = xy(*p0), xy(*p1)
        return f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" {style}/>'

    lo0, hi0 = theorem_one_bounds(n, _as_number(s), 0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="{pad}" y="{pad}" width="{scale}" height="{scale}" fill="none" stroke="black"/>',
        line((0, 0), (1, 1), 'stroke="gray" stroke-dasharray="4 3"'),
        f'<polygon points="{pt(lo0, lo0)} {pt(hi0, hi0)} {pt(1, 0)}" fill="#9ecae1" fill-opacity="0.6" stroke="#3182bd"/>',
    ]
    if alpha is not None:
        a = _as_number(alpha) / n
        lo, hi = theorem_one_bounds(n, _as_number(s), a)
        parts.append(line((lo, lo - a), (hi, hi - a), 'stroke="#d62728" stroke-width="3"'))
    parts += [
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="14">1/p</text>',
        f'<text x="12" y="{size / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 12 {size / 2})">1/q</text>',
        f'<text x="{size / 2}" y="24" text-anchor="middle" font-size="13">n={n}, s={float(s):g}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
