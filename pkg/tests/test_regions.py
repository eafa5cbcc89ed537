import math
from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssops.errors import DomainError
from ssops.regions import (
    RegionQuery,
    alpha_critical,
    lemma_one,
    lemma_two,
    lemma_two_bounds,
    lemma_two_branch_gap,
    polygon_csv,
    region_polygon,
    region_svg,
    remark_one,
    theorem_one,
    theorem_one_bounds,
    theorem_two,
    theorem_two_bounds,
)

fractions = st.fractions(min_value=Fr(1, 50), max_value=Fr(49, 50), max_denominator=60)


def test_theorem_one_example_n3():
    assert theorem_one_bounds(3, Fr(1, 2), Fr(1, 2)) == (Fr(2, 3), Fr(5, 6))
    assert theorem_one(RegionQuery(3, Fr(1, 2), Fr(3, 2), Fr(4, 3), 4)).admissible


def test_theorem_one_half_matches_closed_form():
    # at s = 1/2 the bounds are (n-1)/2n + ((n+1)/2n) a and (n+1)/2n + ((n-1)/2n) a
    for n in (2, 3):
        for a in (Fr(1, 7), Fr(1, 2), Fr(5, 6)):
            lo, hi = theorem_one_bounds(n, Fr(1, 2), a)
            assert lo == Fr(n - 1, 2 * n) + Fr(n + 1, 2 * n) * a
            assert hi == Fr(n + 1, 2 * n) + Fr(n - 1, 2 * n) * a


def test_theorem_one_n2_s1():
    assert theorem_one_bounds(2, 1, Fr(1, 2)) == (Fr(7, 12), Fr(11, 12))


def test_p_equals_q_inadmissible():
    v = theorem_one(RegionQuery(3, Fr(1, 2), Fr(3, 2), 2, 2))
    assert not v.admissible and not v


def test_strict_boundary_flag():
    v = theorem_one(RegionQuery.from_inverse(3, Fr(1, 2), Fr(3, 2), Fr(2, 3), Fr(1, 6)))
    assert not v.admissible and v.boundary


def test_float_equality_tolerance():
    v = theorem_one(RegionQuery(3, 0.5, 1.5, 4 / 3, 4.0))
    assert v.admissible


def test_theorem_one_domain():
    with pytest.raises(DomainError):
        theorem_one(RegionQuery(3, 0, 1, 2, 3))
    with pytest.raises(DomainError):
        theorem_one(RegionQuery(3, 1, 3, 2, 3))


def test_theorem_two_examples():
    assert theorem_two_bounds(3, Fr(1, 2), Fr(1, 3)) == (Fr(1, 9), Fr(8, 9))
    assert theorem_two_bounds(2, 1, Fr(1, 4)) == (Fr(1, 24), Fr(23, 24))
    assert theorem_two_bounds(3, 1, 0) == (Fr(2, 8), Fr(6, 8))
    assert theorem_two(RegionQuery(3, Fr(1, 2), 1, 2)).admissible
    with pytest.raises(DomainError):
        theorem_two(RegionQuery(3, Fr(1, 2), Fr(3, 2), 2))


def test_remark_one():
    assert alpha_critical(3) == Fr(3, 2)
    assert remark_one(RegionQuery(3, 1, Fr(3, 2), 2)).admissible
    assert not remark_one(RegionQuery(3, 1, Fr(7, 5), 2)).admissible
    assert not remark_one(RegionQuery(3, 1, 3, 2)).admissible
    assert not remark_one(RegionQuery(3, 1, 2, math.inf)).admissible


def test_lemma_one():
    assert lemma_one(RegionQuery(2, 0, 1, 3)).admissible
    assert lemma_one(RegionQuery(2, 0, 1, Fr(4, 3), 4)).admissible
    assert not lemma_one(RegionQuery(2, 0, Fr(2, 5), Fr(4, 3), 4)).admissible


def test_lemma_two_examples():
    low, high = lemma_two_branch_gap(2, 1)
    assert low == high == (Fr(1, 4), Fr(1, 2), Fr(3, 4))
    assert lemma_two_bounds(3, 1, Fr(1, 3), "high") == (Fr(1, 6), Fr(1, 2), Fr(2, 3))
    assert lemma_two(RegionQuery.from_inverse(3, 1, 1, Fr(2, 3), Fr(1, 2))).admissible
    with pytest.raises(DomainError):
        lemma_two_bounds(3, 1, Fr(1, 3), "low")


def test_lemma_two_s0_collapses():
    gap, lo, hi = lemma_two_bounds(3, 0, Fr(1, 3), "low")
    assert gap == Fr(1, 3) and lo == hi == Fr(1, 2) + Fr(1, 6)


@given(st.integers(2, 5), fractions)
def test_lemma_two_branch_agreement(n, a):
    assert lemma_two_branch_gap(n, a * n)[0] == lemma_two_branch_gap(n, a * n)[1]


@given(st.integers(2, 5), fractions, st.fractions(Fr(1, 20), Fr(5), max_denominator=20), fractions)
def test_duality_reflection(n, a, s, t):
    lo, hi = theorem_one_bounds(n, s, a)
    inv_p = lo + (hi - lo) * t
    inv_q = inv_p - a
    if not (0 < inv_q < 1 and inv_p < 1):
        return
    q = RegionQuery.from_inverse(n, s, a * n, inv_p, inv_q)
    d = q.dual()
    assert theorem_one(q).admissible == theorem_one(d).admissible
    assert d.dual() == q
    # bounds swap under the reflection
    assert 1 + a - hi == lo


@given(st.integers(2, 5), fractions, st.fractions(Fr(1, 20), Fr(5), max_denominator=20),
       st.fractions(Fr(1, 20), Fr(5), max_denominator=20))
def test_monotone_widening(n, a, s1, s2):
    s1, s2 = sorted((s1, s2))
    lo1, hi1 = theorem_one_bounds(n, s1, a)
    lo2, hi2 = theorem_one_bounds(n, s2, a)
    assert lo2 <= lo1 and hi1 <= hi2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_wave_corollary_consistency(n):
    s = Fr(1, 3)
    a = Fr(2, n + 1)
    d = 2 * n - 2 + 4 * s
    expected = (Fr(n - 1) / d + (4 * s + n - 1) / d * a, (n - 1 + 4 * s) / d + Fr(n - 1) / d * a)
    assert theorem_one_bounds(n, s, Fr(2 * n, n + 1) / n) == expected


def test_polygon_limits():
    rows = region_polygon(3, Fr(1, 2), 5)
    assert (rows[0].inv_p_lower, rows[0].inv_p_upper) == (Fr(2, 6), Fr(4, 6))
    assert rows[-1].inv_p_lower == rows[-1].inv_p_upper == 1
    big = theorem_one_bounds(3, Fr(10 ** 9), Fr(1, 3))
    assert abs(big[0] - Fr(1, 3)) < Fr(1, 10 ** 8) and abs(big[1] - 1) < Fr(1, 10 ** 8)


def test_polygon_csv_row():
    text = polygon_csv(region_polygon(3, Fr(1, 2), 21, extra_alpha=[Fr(3, 2)]))
    lines = text.splitlines()
    assert lines[0] == "alpha_over_n,inv_p_lower,inv_p_upper,s,n"
    assert f"0.5,{2 / 3!r},{5 / 6!r},0.5,3" in lines
    with pytest.raises(DomainError):
        region_polygon(3, 1, 1)


def test_svg():
    svg = region_svg(3, Fr(1, 2), Fr(3, 2))
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
