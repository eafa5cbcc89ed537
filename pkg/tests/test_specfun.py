import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssops.errors import AccuracyError, DomainError, PoleError
from ssops.specfun import (
    BesselOrder,
    bessel_asymptotic,
    bessel_half_integer,
    bessel_j,
    decay_envelope,
    gamma_complex,
    gamma_reciprocal,
    normalized_bessel,
    remainder_envelope,
)


def test_gamma_values():
    assert gamma_complex(1) == pytest.approx(1, abs=1e-14)
    assert gamma_complex(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_against_oracle(oracles):
    for zr, zi, re, im in oracles["gamma"]:
        g = gamma_complex(complex(zr, zi))
        assert abs(g - complex(re, im)) <= 1e-12 * abs(complex(re, im))


def test_gamma_poles():
    with pytest.raises(PoleError):
        gamma_complex(-2)
    assert gamma_reciprocal(-3) == 0


@given(st.floats(0.1, 5), st.floats(-3, 3))
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    assert abs(gamma_complex(z + 1) - z * gamma_complex(z)) <= 1e-11 * abs(gamma_complex(z + 1))


def test_bessel_examples():
    assert bessel_j(BesselOrder(0.5), math.pi / 2).value == pytest.approx(2 / math.pi, abs=1e-10)
    assert bessel_j(BesselOrder(0), 1.0).value == pytest.approx(0.7651976866, abs=1e-10)
    assert bessel_j(BesselOrder(1), 1.0).value == pytest.approx(0.4400505857, abs=1e-10)


def test_bessel_grid_against_series_oracle(oracles):
    worst = 0.0
    for mu, nu, rho, re, im in oracles["bessel_a1"]:
        v = bessel_j(BesselOrder(mu, nu), rho).value
        worst = max(worst, abs(v - complex(re, im)))
    assert worst <= 1e-9


def test_bessel_extra_oracle(oracles):
    for mu, nu, rho, re, im in oracles["bessel_extra"]:
        assert abs(bessel_j(BesselOrder(mu, nu), rho).value - complex(re, im)) <= 1e-9


@pytest.mark.parametrize("k", [-1, 0, 1])
@pytest.mark.parametrize("rho", [0.3, 2.0, 17.5, 400.0])
def test_closed_forms(k, rho):
    exact = {
        -1: math.sqrt(2 / (math.pi * rho)) * math.cos(rho),
        0: math.sqrt(2 / (math.pi * rho)) * math.sin(rho),
        1: math.sqrt(2 / (math.pi * rho)) * (math.sin(rho) / rho - math.cos(rho)),
    }[k]
    assert bessel_half_integer(k, rho) == pytest.approx(exact, abs=1e-13)
    assert abs(bessel_j(BesselOrder(k + 0.5), rho).value - exact) <= 1e-9
    assert bessel_j(BesselOrder(k + 0.5), rho, method="closed_form").method == "closed_form"


def test_closed_form_rejects_other_orders():
    with pytest.raises(DomainError):
        bessel_j(BesselOrder(0.25), 1.0, method="closed_form")


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j(BesselOrder(0), 0.0)
    with pytest.raises(DomainError):
        normalized_bessel(BesselOrder(0), -1.0)


def test_tolerance_raises():
    with pytest.raises(AccuracyError):
        bessel_j(BesselOrder(0.3, 2.0), 50.0, tol=1e-30)


def test_normalized_at_zero():
    assert normalized_bessel(BesselOrder(0.5), 0.0) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-14)
    assert normalized_bessel(BesselOrder(0), 0.0) == pytest.approx(1.0, abs=1e-15)
    series = sum((-1) ** k / (math.factorial(k) * math.gamma(k + 2.5)) for k in range(40))
    assert normalized_bessel(BesselOrder(1.5), 2.0) == pytest.approx(series * 2 ** -1.5, abs=1e-12)


def test_normalized_array_shape():
    out = normalized_bessel(BesselOrder(1.2, 0.5), np.linspace(0, 3, 12).reshape(3, 4))
    assert out.shape == (3, 4)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(-2.0, 2.0), st.floats(0.05, 60.0))
def test_three_term_recurrence(mu, nu, rho):
    v = complex(mu, nu)
    j = lambda w: bessel_j(w, rho).value
    lhs = j(v - 1) + j(v + 1)
    rhs = 2 * v / rho * j(v)
    scale = max(1.0, abs(j(v - 1)), abs(j(v + 1)), abs(rhs))
    assert abs(lhs - rhs) <= 1e-8 * scale


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.1, 30.0))
def test_conjugate_symmetry(mu, nu, rho):
    a = bessel_j(BesselOrder(mu, nu), rho).value
    b = bessel_j(BesselOrder(mu, -nu), rho).value
    assert abs(a - b.conjugate()) <= 1e-10 * max(1, abs(a))


def test_asymptotic_example():
    v = bessel_asymptotic(BesselOrder(0.5), 10.0)
    assert v == pytest.approx(math.sqrt(2 / (10 * math.pi)) * math.cos(10 - math.pi / 2), abs=1e-14)
    assert abs(bessel_j(BesselOrder(0), 50.0).value - bessel_asymptotic(BesselOrder(0), 50.0)) <= 5 * 50 ** -1.5


def test_remainder_envelope_bounded():
    rho = np.logspace(0, 3, 400)
    c0 = remainder_envelope(BesselOrder(0), rho)
    c1 = remainder_envelope(BesselOrder(0, 1), rho)
    assert 0 < c0 < 5
    assert math.isfinite(c1) and c1 > c0


def test_decay_envelope_finite():
    rho = np.logspace(-2, 3, 500)
    for mu in (0.0, 0.5, 1.5):
        assert decay_envelope(BesselOrder(mu, 1.0), rho) < 50
