import json
import math
from dataclasses import dataclass

import numpy as np
import pytest

from ssops.errors import DomainError, ResolutionError, ValidationError
from ssops.fields import GridSpec, SampledField, lattice_radii, lp_norm, sobolev_norm, spectrum
from ssops.maximal import LatticeBall
from ssops.scan import ScanReport, ScanRow, TestFamily, default_threads, knapp_cap, run_scan

G = GridSpec(2, 256, 4.0)
ARGS = dict(n=2, alpha=1.0, s=1.0, p=4 / 3, q=4.0)


@dataclass(frozen=True)
class ShiftedFamily(TestFamily):
    steps: tuple = (0, 0)

    def member(self, grid, index):
        return super().member(grid, index).shift(self.steps)


@dataclass(frozen=True)
class ZeroFamily(TestFamily):
    def member(self, grid, index):
        return SampledField.zeros(grid)


def test_family_validation():
    with pytest.raises(ValidationError):
        TestFamily("gaussian_dilates", ())
    with pytest.raises(ValidationError):
        TestFamily("gaussian_dilates", (1.0, -0.5))
    with pytest.raises(ValueError):
        TestFamily("triangles", (1.0,))
    assert TestFamily.dyadic("knapp_caps").scales == (1.0, 0.5, 0.25, 0.125, 0.0625)


@pytest.mark.parametrize("kind", ["gaussian_dilates", "ball_indicators", "knapp_caps", "random_bumps"])
def test_members_nonzero_and_deterministic(kind):
    fam = TestFamily(kind, (1.0, 0.5), seed=4)
    for i in range(2):
        a, b = fam.member(G, i), fam.member(G, i)
        assert np.any(a.values) and np.array_equal(a.values, b.values)


def test_knapp_cap_support():
    d = 0.25
    fh = spectrum(knapp_cap(G, d))
    xi = np.fft.fftfreq(G.points_per_axis, G.spacing)
    rad = lattice_radii(G)
    live = np.abs(fh) > 1e-12 * np.abs(fh).max()
    assert np.all(np.abs(rad[live] - 1 / d) < 0.5)
    ang = np.arccos(np.clip(xi[:, None] / np.where(rad > 0, rad, 1), -1, 1))
    assert np.all(ang[live] < 0.5 * math.sqrt(d))


def test_ratio_definition():
    fam = TestFamily("gaussian_dilates", (0.5,))
    rep = run_scan(family=fam, grid=G, **ARGS)
    row = rep.rows[0]
    assert row.rhs == pytest.approx(sobolev_norm(fam.member(G, 0), 4 / 3, 1.0), rel=1e-12)
    assert row.ratio == pytest.approx(row.lhs / row.rhs)


def test_ball_kernel_matches_physical_convolution():
    fam = TestFamily("gaussian_dilates", (0.5,))
    rep = run_scan(2, 2.0, 0.5, 2.0, 4.0, fam, G, diagnostic=True)
    f = fam.member(G, 0)
    ball = LatticeBall.build(G)
    k = ball.dense(np.ones(len(ball.radius), bool))
    conv = np.real(np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(k))) * G.cell_volume
    assert rep.rows[0].lhs == pytest.approx(lp_norm(SampledField(G, conv), 4.0), rel=5e-3)


@pytest.mark.parametrize("steps", [(3, -5), (17, 40)])
def test_translation_invariance(steps):
    base = run_scan(family=TestFamily("random_bumps", (0.5, 0.25), seed=2), grid=G, **ARGS)
    moved = run_scan(family=ShiftedFamily("random_bumps", (0.5, 0.25), seed=2, steps=steps), grid=G, **ARGS)
    for a, b in zip(base.rows, moved.rows):
        assert abs(a.ratio - b.ratio) <= 1e-10 * a.ratio


def test_zero_family_rejected():
    with pytest.raises(ValidationError):
        run_scan(family=ZeroFamily("gaussian_dilates", (0.5,)), grid=G, **ARGS)


def test_outside_region_needs_diagnostic():
    fam = TestFamily("gaussian_dilates", (1.0, 0.5))
    with pytest.raises(DomainError):
        run_scan(2, 1.0, 1.0, 2.0, 4.0, fam, G)
    rep = run_scan(2, 1.0, 1.0, 2.0, 4.0, fam, G, diagnostic=True)
    assert rep.diagnostic and len(rep.rows) == 2


def test_remark_range_p_equals_q_bounded():
    # alpha above ((n-1)/(n+1)) n with p = q is covered by the remark
    fam = TestFamily("gaussian_dilates", (1.0, 0.5, 0.25))
    rep = run_scan(2, 1.0, 0.5, 2.0, 2.0, fam, G)
    assert math.isfinite(rep.max_ratio) and rep.max_ratio < 10


def test_resolution_guard():
    with pytest.raises(ResolutionError):
        run_scan(family=TestFamily("gaussian_dilates", (0.0625,)), grid=G, **ARGS)


def test_report_summary_and_flag():
    rows = tuple(ScanRow(i, d, r, 1.0, r) for i, (d, r) in enumerate([(1.0, 1.0), (0.5, 2.0), (0.25, 4.0)]))
    rep = ScanReport(2, 1.0, 1.0, 4 / 3, 4.0, "gaussian_dilates", 64, 4.0, False, rows)
    assert rep.spread == pytest.approx(4.0)
    assert rep.slope == pytest.approx(-1.0)
    assert rep.growth_flag


def test_threads_and_determinism(monkeypatch):
    fam = TestFamily("random_bumps", (1.0, 0.5, 0.25), seed=7)
    one = run_scan(family=fam, grid=G, threads=1, **ARGS)
    many = run_scan(family=fam, grid=G, threads=3, **ARGS)
    assert one.to_json() == many.to_json()
    assert one.to_csv() == many.to_csv()
    assert json.loads(one.to_json())["rows"][2]["index"] == 2
    monkeypatch.setenv("SSOPS_THREADS", "4")
    assert default_threads() == 4
    monkeypatch.setenv("SSOPS_THREADS", "x")
    with pytest.raises(ValidationError):
        default_threads()
