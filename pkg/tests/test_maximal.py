import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssops.errors import DomainError, ResolutionError
from ssops.fields import GridSpec, SampledField, ball_indicator, gaussian, impulse
from ssops.kernels import KernelSpec, kernel_value
from ssops.maximal import (
    ConeRectanglePair,
    LatticeBall,
    Shell,
    averaged_maximal,
    averaged_maximal_batch,
    build_sphere_grid,
    directional_maximal,
    hedberg_check,
    in_cone,
    maximal_csv,
    maximal_scan,
    maximal_test_family,
    partial_operator,
    rectangle_domination_check,
    shell_cone_inclusion_check,
    shell_estimates,
    shell_index,
)
from ssops.fields import lp_norm

G64 = GridSpec(2, 64, 2.0)  # h = 1/16, resolves rho <= 2


def test_shell_index():
    assert shell_index([0.0, 0.0]) == 0
    assert Shell(0).contains(np.zeros(2))
    assert shell_index([0.5, 0.0]) == 0
    assert shell_index([0.75, 0.0]) == 1
    assert shell_index([1.0, 0.0]) == -1
    assert shell_index([0.9, 0.0]) == 3


def test_shell_half_open():
    for ell in range(1, 6):
        u = np.array([1 - 2.0 ** -ell, 0.0])
        assert not Shell(ell).contains(u)
        assert Shell(ell).contains(np.array([1 - 2.0 ** (-ell - 1), 0.0]))


@settings(max_examples=200)
@given(st.floats(0.0, 0.999999), st.floats(0, 2 * math.pi))
def test_shell_partition(r, th):
    u = np.array([r * math.cos(th), r * math.sin(th)])
    ell = int(shell_index(u))
    assert Shell(ell).contains(u)
    assert sum(bool(Shell(k).contains(u)) for k in range(40)) <= 1


@pytest.mark.parametrize("rho,minimum", [(1, 13), (3, 51)])
def test_sphere_grid_n2(rho, minimum):
    sg = build_sphere_grid(2, rho)
    assert sg.count >= minimum
    assert sg.covering_radius <= 2.0 ** -rho
    assert np.max(np.abs(np.linalg.norm(sg.directions, axis=1) - 1)) <= 1e-14


@pytest.mark.parametrize("rho", [1, 2, 3])
def test_sphere_grid_n3(rho):
    sg = build_sphere_grid(3, rho, samples=20000)
    assert sg.covering_radius <= 2.0 ** -rho
    assert np.max(np.abs(np.linalg.norm(sg.directions, axis=1) - 1)) <= 1e-14
    assert sg.cardinality_constant < 12


def test_sphere_grid_domain():
    with pytest.raises(DomainError):
        build_sphere_grid(4, 2)
    with pytest.raises(DomainError):
        build_sphere_grid(2, 0)


def test_cone_apex():
    assert in_cone(np.zeros(2), np.array([1.0, 0.0]), 3)
    assert not in_cone(np.array([0.0, 1.0]), np.array([1.0, 0.0]), 3)


def test_figure_configuration_inclusion():
    assert shell_cone_inclusion_check(2, 5, 100_000, ells=[3, 5]) == 0
    assert shell_cone_inclusion_check(2, 3, 20_000, ells=[0]) == 0
    assert shell_cone_inclusion_check(3, 3, 20_000, ells=[0, 3]) == 0


@given(st.integers(2, 3), st.integers(1, 8), st.integers(0, 8))
def test_rectangle_measure(n, rho, ell):
    pair = ConeRectanglePair(np.eye(n)[0], rho, ell)
    assert pair.measure == ConeRectanglePair.formula_measure(n, rho, ell)


def test_directional_zero_and_homogeneous():
    sg = build_sphere_grid(2, 2)
    x = np.array([32, 32])
    assert directional_maximal(SampledField.zeros(G64), sg, 0, x) == 0
    f = gaussian(G64, 0.4)
    a = directional_maximal(f, sg, 5, x)
    assert directional_maximal(f * 3.5, sg, 5, x) == pytest.approx(3.5 * a, rel=1e-12)


def test_directional_ball_geometry():
    g = GridSpec(2, 128, 4.0)
    sg = build_sphere_grid(2, 2)
    f = ball_indicator(g, 3.0, center=g.points()[64, 64])
    half = 2 * math.asin(0.5 * 2.0 ** -2)
    exact = max(half * (b * b - a * a) / (2.0 ** -ell * 2.0 ** -2)
                for ell in range(3) for a, b in [Shell(ell).radius_range])
    assert directional_maximal(f, sg, 0, np.array([64, 64])) == pytest.approx(exact, rel=0.1)


def test_batch_matches_direct_sum():
    sg = build_sphere_grid(2, 2)
    f = gaussian(G64, 0.4, center=[0.2, -0.1])
    M = averaged_maximal(f, sg).values
    for x in ([32, 32], [40, 25]):
        direct = sum(directional_maximal(f, sg, v, np.array(x)) for v in range(sg.count)) * 2.0 ** -2
        assert M[tuple(x)] == pytest.approx(direct, rel=1e-9)


def test_averaged_zero_and_homogeneous():
    sg = build_sphere_grid(2, 2)
    assert not averaged_maximal(SampledField.zeros(G64), sg).values.any()
    f = ball_indicator(G64, 0.5)
    assert np.allclose(averaged_maximal(f * 2.0, sg).values, 2 * averaged_maximal(f, sg).values, atol=1e-12)


def test_averaged_radial_symmetry():
    g = GridSpec(2, 256, 2.0)
    N, h = g.points_per_axis, g.spacing
    M = averaged_maximal(gaussian(g, 0.5), build_sphere_grid(2, 2)).values
    groups = defaultdict(list)
    K = int(1.5 / h)
    for a in range(-K, K):
        for b in range(-K, K):
            groups[(2 * a + 1) ** 2 + (2 * b + 1) ** 2].append((a, b))
    worst = 0.0
    for nodes in groups.values():
        classes = {tuple(sorted((abs(2 * a + 1), abs(2 * b + 1)))) for a, b in nodes}
        if len(classes) > 1:
            vals = [M[a + N // 2, b + N // 2] for a, b in nodes]
            worst = max(worst, (max(vals) - min(vals)) / M.max())
    assert worst <= 0.02


def test_resolution_and_sign_guards():
    with pytest.raises(ResolutionError):
        averaged_maximal(gaussian(G64), build_sphere_grid(2, 3))
    with pytest.raises(DomainError):
        averaged_maximal(gaussian(G64) * -1.0, build_sphere_grid(2, 2))


def test_partial_operator_impulse():
    g = GridSpec(2, 128, 2.0)
    rho = 3
    out = partial_operator(impulse(g), 1.0, rho).values
    ball = LatticeBall.build(g)
    keep = 1 - ball.radius >= 2.0 ** (-rho - 1)
    expected = np.zeros(g.shape)
    idx = tuple(((ball.index[keep] + 64) % 128).T)
    expected[idx] = kernel_value(KernelSpec.make("natural", 1.0, 2), ball.points[keep]).real
    assert np.max(np.abs(out - expected)) <= 1e-9 * expected.max()


def test_partial_operator_monotone_in_rho():
    g = GridSpec(2, 128, 2.0)
    f = gaussian(g, 0.3)
    lo = partial_operator(f, 1.0, 1).values
    hi = partial_operator(f, 1.0, 3).values
    assert np.all(hi >= lo - 1e-12)


def test_partial_operator_ball_closed_form():
    g = GridSpec(2, 512, 4.0)
    f = ball_indicator(g, 3.0, center=g.points()[256, 256])
    for rho in (2, 3, 4):
        b = 1 - 2.0 ** (-rho - 1)
        exact = 2 * math.pi * (1 - math.sqrt(1 - b * b))
        assert partial_operator(f, 1.0, rho).values[256, 256] == pytest.approx(exact, rel=0.02)


def test_hedberg_basic():
    f = gaussian(G64, 0.4)
    assert hedberg_check(SampledField.zeros(G64), 1.0, 4 / 3, 4.0, 2) == 0
    c = hedberg_check(f, 1.0, 4 / 3, 4.0, 2)
    assert 0 < c < 10
    assert hedberg_check(f * 11.0, 1.0, 4 / 3, 4.0, 2) == pytest.approx(c, rel=1e-9)
    with pytest.raises(DomainError):
        hedberg_check(f, 1.0, 2.0, 4.0, 2)


def test_shell_estimates_finite():
    f = gaussian(G64, 0.4)
    res = averaged_maximal_batch([f], build_sphere_grid(2, 2), alpha=1.0, keep_shells=True)
    est = shell_estimates(res, np.array([lp_norm(f, 4 / 3)]), 1.0, 2, 4 / 3, 4.0)[0]
    assert all(math.isfinite(v) and v > 0 for v in
               (est.maximal_constant, est.holder_constant, est.split_constant))


def test_rectangle_domination():
    sg = build_sphere_grid(2, 2)
    f = ball_indicator(G64, 0.6, center=[0.3, 0.0])
    for v in (0, 7):
        assert rectangle_domination_check(f, sg, v, np.array([30, 33])) <= 1e-12


def test_maximal_scan_report():
    fam = maximal_test_family(G64, bumps=2, seed=3)
    assert set(fam) == {"gaussian", "ball", "bumps0", "bumps1"}
    rows = maximal_scan(fam, [1, 2], 1.0, 4 / 3, 4.0, violations={1: 0, 2: 0})
    assert len(rows) == 8
    text = maximal_csv(rows)
    assert text.splitlines()[0].startswith("field,rho,inclusion_violations")
    assert text == maximal_csv(maximal_scan(fam, [1, 2], 1.0, 4 / 3, 4.0, violations={1: 0, 2: 0}))
