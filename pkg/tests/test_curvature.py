import numpy as np
import pytest
from hypothesis import given, strategies as st

from xcflab.curvature import (adjugate_cross, cross_via_ricciE, curvature_pack, einstein_from_jet, pack_from_einstein,
                              pack_from_jet, ricci_decomposition_residual, sectional)
from xcflab.errors import DegeneratePlane, NonPositiveMetric
from xcflab.families import Flat, HyperbolicBall, HyperbolicHalfspace, PeriodicSynthetic
from xcflab.grid import PERIODIC, MetricGrid
from xcflab.verify import random_metric_jet

seeds = st.integers(0, 2 ** 32 - 1)


def halfspace(K0=-1.0, n=9, h=1 / 16):
    return MetricGrid.centered(HyperbolicHalfspace(K0), n, h, center=(0.0, 0.0, 1.5))


# -- constant curvature closed forms ------------------------------------------------

def test_halfspace_unit_curvature_closed_forms():
    grid = halfspace()
    p = curvature_pack(grid, derivatives="analytic")
    g = p.g
    np.testing.assert_allclose(p.Ric, -2.0 * g, rtol=1e-12)
    np.testing.assert_allclose(p.Sc, -6.0, rtol=1e-12)
    np.testing.assert_allclose(p.Ein, g, rtol=1e-12)
    np.testing.assert_allclose(p.lam, 1.0, rtol=1e-12)
    np.testing.assert_allclose(p.adjEin, g, rtol=1e-12)
    np.testing.assert_allclose(p.detE, 1.0, rtol=1e-12)
    np.testing.assert_allclose(p.traceCross, 3.0, rtol=1e-12)
    np.testing.assert_allclose(cross_via_ricciE(p), g, rtol=1e-12)
    assert ricci_decomposition_residual(p) <= 1e-12


@pytest.mark.parametrize("i, j", [(0, 1), (0, 2), (1, 2)])
def test_constant_curvature_sectional(i, j):
    p = curvature_pack(halfspace(), derivatives="analytic")
    np.testing.assert_allclose(sectional(p, i, j), -1.0, rtol=1e-12)


def test_halfspace_minus_two_converges_at_second_order():
    errs = []
    for n, h in ((7, 1 / 8), (13, 1 / 16), (25, 1 / 32)):
        p = curvature_pack(halfspace(-2.0, n, h), stencil_order=2)
        g = p.g
        phi = g[..., :1, :1]   # conformal factor
        errs.append(max(np.max(np.abs(p.Ein - 2 * g) / phi), np.max(np.abs(p.adjEin - 4 * g) / phi),
                        np.max(np.abs(p.detE - 8.0)) / 8.0))
    assert errs[2] < errs[1] < errs[0]
    assert 3.4 <= errs[1] / errs[2] <= 4.6


def test_fourth_order_stencil_beats_second_order():
    grid = halfspace(-1.0, 13, 1 / 16)
    e2 = np.max(np.abs(curvature_pack(grid, 2).detE - 1.0))
    e4 = np.max(np.abs(curvature_pack(grid, 4).detE - 1.0))
    assert e4 < e2 / 10


def test_ricci_decomposition_residual_on_grid_is_roundoff():
    # the decomposition is algebraic in 3D, so FD data satisfy it exactly up to rounding
    p = curvature_pack(halfspace(-1.0, 9, 1 / 16), 2)
    assert ricci_decomposition_residual(p) <= 1e-12


def test_flat_metric_has_zero_curvature():
    p = curvature_pack(MetricGrid.centered(Flat(), 5, 0.1), 2)
    for f in (p.Riem, p.Ein, p.adjEin):
        np.testing.assert_allclose(f, 0.0, atol=1e-12)
    assert not np.any(p.ein_spd)
    assert np.all(np.isnan(p.V))


def test_periodic_pack_matches_analytic_jet():
    grid = MetricGrid.from_family(PeriodicSynthetic(0.05), (16, 16, 16), (1 / 16,) * 3, (0.0,) * 3,
                                  boundary=PERIODIC)
    fd = curvature_pack(grid, 4)
    exact = curvature_pack(grid, derivatives="analytic")
    assert np.max(np.abs(fd.Ein - exact.Ein)) < 5e-3 * np.max(np.abs(exact.Ein))


def test_ball_chart_center():
    p = curvature_pack(MetricGrid.centered(HyperbolicBall(-1.0), 5, 0.05), derivatives="analytic")
    np.testing.assert_allclose(p.Ein[2, 2, 2], 4.0 * np.eye(3), rtol=1e-12)


# -- pointwise algebra ---------------------------------------------------------------

def test_diagonal_model_lambda_123():
    p = pack_from_einstein(np.eye(3), np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(p.lam, [1.0, 2.0, 3.0])
    assert sectional(p, 0, 1) == pytest.approx(-3.0, abs=1e-12)
    assert sectional(p, 1, 2) == pytest.approx(-1.0, abs=1e-12)
    assert sectional(p, 0, 2) == pytest.approx(-2.0, abs=1e-12)
    np.testing.assert_allclose(cross_via_ricciE(p), np.diag([6.0, 3.0, 2.0]), atol=1e-12)
    np.testing.assert_allclose(p.detE, 6.0)


def test_sectional_same_axis_is_degenerate():
    p = pack_from_einstein(np.eye(3), np.eye(3))
    with pytest.raises(DegeneratePlane):
        sectional(p, 1, 1)


def test_pack_from_jet_rejects_indefinite_metric():
    g, dg, ddg = random_metric_jet(np.random.default_rng(0))
    with pytest.raises(NonPositiveMetric):
        pack_from_jet(-g, dg, ddg)


@given(seeds)
def test_riemann_symmetries(seed):
    p = pack_from_jet(*random_metric_jet(np.random.default_rng(seed)))
    R = p.Rm
    s = np.max(np.abs(R))
    assert np.max(np.abs(R + np.swapaxes(R, 0, 1))) <= 1e-12 * s
    assert np.max(np.abs(R + np.swapaxes(R, 2, 3))) <= 1e-12 * s
    assert np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))) <= 1e-12 * s
    bianchi = R + np.einsum("jkil->ijkl", R) + np.einsum("kijl->ijkl", R)
    assert np.max(np.abs(bianchi)) <= 1e-12 * s


@given(seeds)
def test_einstein_definition(seed):
    p = pack_from_jet(*random_metric_jet(np.random.default_rng(seed)))
    np.testing.assert_allclose(p.Ein, p.Ric - 0.5 * p.Sc * p.g, atol=1e-12 * np.max(np.abs(p.Ric)))
    assert np.all(np.diff(p.lam) >= 0)
    np.testing.assert_allclose(p.detE, np.prod(p.lam), rtol=1e-12)


@given(seeds)
def test_cross_routes_and_decomposition(seed):
    p = pack_from_jet(*random_metric_jet(np.random.default_rng(seed)))
    scale = np.max(np.abs(p.adjEin))
    assert np.max(np.abs(cross_via_ricciE(p) - p.adjEin)) <= 1e-10 * scale
    assert np.max(np.abs(adjugate_cross(p.g, p.Ein) - p.adjEin)) <= 1e-10 * scale
    assert ricci_decomposition_residual(p) <= 1e-10


@given(seeds)
def test_adjugate_eigenvalues_are_pair_products(seed):
    rng = np.random.default_rng(seed)
    g = random_metric_jet(rng)[0]
    a = rng.normal(size=(3, 3))
    p = pack_from_einstein(g, a @ a.T + 0.1 * np.eye(3))
    lam = p.lam
    mu = np.sort(np.linalg.eigvals(np.linalg.solve(p.g, p.adjEin)).real)
    expected = np.sort([lam[1] * lam[2], lam[0] * lam[2], lam[0] * lam[1]])
    np.testing.assert_allclose(mu, expected, rtol=1e-9)
    # endomorphism identity adj(opEin) opEin = detE
    endo = np.linalg.solve(p.g, p.adjEin) @ np.linalg.solve(p.g, p.Ein)
    np.testing.assert_allclose(endo, p.detE * np.eye(3), atol=1e-10 * lam[-1] ** 3)


@given(seeds)
def test_ein_spd_iff_all_sectionals_negative(seed):
    rng = np.random.default_rng(seed)
    g = random_metric_jet(rng)[0]
    a = rng.normal(size=(3, 3))
    p = pack_from_einstein(g, a + a.T)
    sec = [float(sectional(p, i, j)) for i, j in ((0, 1), (0, 2), (1, 2))]
    assert bool(p.ein_spd) == all(s < 0 for s in sec)


def test_einstein_from_jet_is_pointwise():
    rng = np.random.default_rng(3)
    jets = [random_metric_jet(rng) for _ in range(4)]
    g, dg, ddg = (np.stack(x) for x in zip(*jets))
    batch = einstein_from_jet(g, dg, ddg)
    for k, jet in enumerate(jets):
        np.testing.assert_allclose(batch[k], einstein_from_jet(*jet), rtol=1e-13, atol=1e-13)
