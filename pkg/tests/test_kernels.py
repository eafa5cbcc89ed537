import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssops.errors import DomainError
from ssops.fields import GridSpec
from ssops.kernels import (
    AlphaParams,
    Family,
    KernelSpec,
    critical_z,
    domination_check,
    fit_loglog_slope,
    kernel_value,
    multiplier,
    multiplier_envelope,
    radial_kernel_value,
    surface_measure_constant,
    surface_measure_transform,
    theta_endpoint_check,
    theta_index,
    transform_check,
)


def test_alpha_params():
    p = AlphaParams(1.5, 3)
    assert p.lam == pytest.approx(1.0)
    assert p.delta == pytest.approx(1 - 4 / 6 * 1.5)


def test_standard_alpha_n_is_ball_indicator():
    spec = KernelSpec.make("standard", 2, 2)
    assert kernel_value(spec, [0.3, -0.4]) == pytest.approx(1.0, abs=1e-14)
    assert kernel_value(spec, [0.0, 0.999]) == pytest.approx(1.0, abs=1e-14)


def test_natural_example():
    v = kernel_value(KernelSpec.make("natural", 1, 2), [0.5, 0.0])
    assert v == pytest.approx(2 / math.sqrt(3), abs=1e-13)


@pytest.mark.parametrize("family,alpha,s", [("standard", 1.0, 0), ("natural", 1.0, 0), ("flat", 0.5, 0),
                                            ("sweighted", 1.2, 0.1)])
def test_support(family, alpha, s):
    spec = KernelSpec.make(family, alpha, 2, s)
    assert kernel_value(spec, [1.5, 0.0]) == 0
    assert kernel_value(spec, [1.0, 0.0]) == 0


def test_kernel_value_batch_shape():
    spec = KernelSpec.make("standard", 2.0, 3)
    pts = np.random.default_rng(0).uniform(-1, 1, (5, 7, 3))
    assert kernel_value(spec, pts).shape == (5, 7)


def test_nonintegrable_standard_rejected():
    with pytest.raises(DomainError):
        kernel_value(KernelSpec.make("standard", 0.2, 2), [0.1, 0.1])
    with pytest.raises(DomainError):
        kernel_value(KernelSpec.make("theta", 1.0, 2, 0.5, 0.5), [0.1, 0.1])


def test_bad_dimension():
    with pytest.raises(DomainError):
        kernel_value(KernelSpec.make("standard", 1.0, 2), [0.1, 0.1, 0.1])


@pytest.mark.parametrize("n", [2, 3])
def test_sine_profile(n):
    rho = np.linspace(0.01, 20, 100)
    m = multiplier(KernelSpec.make("standard", 2 * n / (n + 1), n))
    assert np.max(np.abs(m(rho) - np.sin(2 * np.pi * rho) / (np.pi * rho))) <= 1e-9
    assert m(0.25) == pytest.approx(4 / math.pi, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_volume_at_zero(n):
    m = multiplier(KernelSpec.make("standard", n, n))
    assert abs(m(0.0) - math.pi ** (n / 2) / math.gamma(n / 2 + 1)) <= 1e-12


def test_bessel_potential_profile():
    m = multiplier(KernelSpec.make("bessel_potential", 0, 2, s=1))
    assert m(1.0) == pytest.approx(2 ** -0.5, abs=1e-15)
    assert m.decay_exponent == 1.0


@pytest.mark.parametrize("n,alpha", [(2, 1.0), (3, 1.5), (3, 2.0)])
def test_envelope_slope(n, alpha):
    m = multiplier(KernelSpec.make("standard", alpha, n))
    locs, peaks = multiplier_envelope(m)
    assert fit_loglog_slope(locs, peaks) == pytest.approx(-(n + 1) / (2 * n) * alpha, abs=0.05)


def test_natural_multiplier_matches_mass():
    # m(0) equals the integral of the kernel
    spec = KernelSpec.make("natural", 1.0, 2)
    r = np.linspace(0, 1, 200001)[:-1] + 0.5 / 200000
    mass = np.sum(radial_kernel_value(spec, r).real * 2 * np.pi * r) / 200000
    assert multiplier(spec)(0.0).real == pytest.approx(mass, rel=1e-3)


def test_profile_finite_at_zero_for_complex_alpha():
    m = multiplier(KernelSpec.make("standard", complex(1.1, 0.5), 2))
    assert np.isfinite(m(0.0))


def test_surface_measure():
    rho = np.linspace(0.01, 10, 50)
    sig = surface_measure_transform(3)(rho)
    assert np.max(np.abs(sig - 2 * np.sin(2 * np.pi * rho) / rho)) <= 1e-9
    for n in (2, 3, 4):
        assert surface_measure_constant(n) == pytest.approx(1 / (2 * np.pi), rel=1e-9)


def test_theta_index_at_critical_z():
    for n in (2, 3, 4):
        for s in (0.25, 0.5, 1.0):
            a = 0.7
            std = n / 2 - (n + 1) / 2 * (1 - a / n)
            assert theta_index(a, s, n, critical_z(s, n)) == pytest.approx(std, abs=1e-14)


def test_theta_example_indices():
    # n=2, alpha=1, s=1/2 -> z = 1/2 and index 1/4 on both sides
    assert critical_z(0.5, 2) == pytest.approx(0.5)
    assert theta_index(1.0, 0.5, 2, 0.5) == pytest.approx(0.25)


@pytest.mark.parametrize("alpha,s,n", [(1.0, 1.0, 3), (1.0, 0.5, 2), (complex(0.8, 0.6), 0.3, 3)])
def test_theta_endpoints(alpha, s, n):
    rep = theta_endpoint_check(alpha, s, n)
    assert rep.max_discrepancy <= 1e-9
    # the exchanged pairing is a genuinely different kernel
    assert rep.swapped_zero_vs_flat > 1e-3
    assert rep.swapped_one_vs_sweighted > 1e-3


def test_domination_constant_ratio():
    rep = domination_check(1.0, 2, samples=20000, imag_parts=[0.0])
    delta = 1 - 3 / 4
    expected = math.pi ** -delta / abs(math.gamma(1 - delta))
    assert rep.sup_ratio == pytest.approx(expected, rel=1e-10)
    assert rep.inf_ratio == pytest.approx(expected, rel=1e-10)


def test_domination_complex_and_standard():
    rep = domination_check(complex(0.5, 1.0), 2, samples=100000)
    assert math.isfinite(rep.sup_ratio)
    rep3 = domination_check(2.2, 3, samples=100000, kind="standard")
    assert math.isfinite(rep3.sup_ratio) and rep3.sup_ratio > 0
    with pytest.raises(DomainError):
        domination_check(1.0, 3, kind="standard")


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 1.3), st.floats(0.0, 1.0))
def test_multiplier_conjugation(re, im):
    a = multiplier(KernelSpec.make("flat", complex(re, im), 2))
    b = multiplier(KernelSpec.make("flat", complex(re, -im), 2))
    rho = np.linspace(0, 8, 33)
    assert np.allclose(a(rho), np.conj(b(rho)), atol=1e-11)


def test_transform_check_small_grid():
    rep = transform_check(KernelSpec.make("standard", 1.2, 2), GridSpec(2, 128, 2.0), max_frequency=8.0)
    assert rep.max_rel_error < 0.03


def test_theta_domain():
    with pytest.raises(DomainError):
        KernelSpec.make(Family.THETA, 1.0, 2, 0.5, 1.5)
    with pytest.raises(DomainError):
        KernelSpec.make("standard", 1.0, 2, s=-1)
