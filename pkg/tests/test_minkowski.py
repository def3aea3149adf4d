import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xcflab import scenarios as sc
from xcflab.curvature import curvature_pack, pack_from_einstein, sectional
from xcflab.errors import NonPositiveEin, NonSymmetricA
from xcflab.families import Flat
from xcflab.grid import MetricGrid
from xcflab.minkowski import (HyperboloidFamily, gauss_cross_residual, gauss_residual, gcf_xcf_correspondence,
                              hyperboloid_deviation, integrate_embedding, is_integrable, principal_curvatures,
                              weingarten_from_intrinsic)
from xcflab.symbol import random_spd
from xcflab.tensors import minkowski_dot

seeds = st.integers(0, 2 ** 32 - 1)


def test_weingarten_diagonal_model():
    p = pack_from_einstein(np.eye(3), np.diag([6.0, 3.0, 2.0]))
    W, A, K = weingarten_from_intrinsic(p)
    np.testing.assert_allclose(W, np.diag([1.0, 2.0, 3.0]), atol=1e-12)
    np.testing.assert_allclose(A, W, atol=1e-12)
    assert K == pytest.approx(6.0)
    np.testing.assert_allclose(principal_curvatures(W, p.g), [1.0, 2.0, 3.0], atol=1e-12)


def test_weingarten_constant_curvature():
    p = curvature_pack(sc.halfspace_grid(1 / 16), derivatives="analytic")
    W, A, K = weingarten_from_intrinsic(p)
    np.testing.assert_allclose(W, np.broadcast_to(np.eye(3), W.shape), atol=1e-12)
    np.testing.assert_allclose(A, p.g, rtol=1e-12)
    np.testing.assert_allclose(K, 1.0, rtol=1e-12)


@given(seeds)
def test_principal_products_are_minus_sectionals(seed):
    rng = np.random.default_rng(seed)
    g, E = random_spd(rng), random_spd(rng)
    p = pack_from_einstein(g, E)
    W, A, K = weingarten_from_intrinsic(p)
    k = principal_curvatures(W, p.g)
    assert np.all(k > 0)
    # kappa_i kappa_j over the eigenplanes equals the opposite eigenvalue of opEin
    np.testing.assert_allclose(sorted([k[0] * k[1], k[0] * k[2], k[1] * k[2]]), p.lam, rtol=1e-9)
    assert K == pytest.approx(float(np.prod(k)), rel=1e-9)
    assert max(gauss_residual(p, A)) <= 1e-10
    assert gauss_cross_residual(p) <= 1e-10


def test_gauss_residual_negative_control():
    p = pack_from_einstein(np.eye(3), np.diag([6.0, 3.0, 2.0]))
    assert min(gauss_residual(p, np.eye(3))) > 0.1
    with pytest.raises(NonSymmetricA):
        gauss_residual(p, np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))


def test_indefinite_einstein_is_rejected():
    p = pack_from_einstein(np.eye(3), np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(NonPositiveEin):
        weingarten_from_intrinsic(p)


def test_sectional_matches_principal_pairs():
    p = pack_from_einstein(np.eye(3), np.diag([6.0, 3.0, 2.0]))
    # planes are spanned by eigen-directions sorted by eigenvalue (2, 3, 6)
    assert sectional(p, 0, 1) == pytest.approx(-6.0)
    assert sectional(p, 1, 2) == pytest.approx(-2.0)


@pytest.fixture(scope="module")
def embedded():
    grid = sc.halfspace_grid(1 / 16)
    return grid, integrate_embedding(grid)


def test_embedding_of_hyperbolic_chart(embedded):
    grid, emb = embedded
    assert emb.metricResidual < 5e-3
    assert emb.pathResidual < 2e-3
    assert emb.normalResidual < 1e-3
    assert hyperboloid_deviation(emb.F)[0] < 5e-3


def test_embedding_base_point_is_exact(embedded):
    grid, emb = embedded
    b = tuple(n // 2 for n in grid.dims)
    assert np.array_equal(emb.F[b], np.zeros(4))
    assert minkowski_dot(emb.nu[b], emb.nu[b]) == -1.0
    np.testing.assert_allclose(emb.gRecovered[b], grid.values[b], atol=1e-14)


def test_embedding_json_and_path_argument(embedded):
    grid, emb = embedded
    doc = json.loads(emb.to_json())
    assert len(doc["F"]) == 4 * int(np.prod(grid.dims))
    assert set(doc["residuals"]) == {"metricResidual", "pathResidual", "normalResidual"}
    with pytest.raises(ValueError):
        integrate_embedding(grid, path_order=(0, 0, 1))
    with pytest.raises(NonPositiveEin):
        integrate_embedding(MetricGrid.centered(Flat(), 5, 0.1))


def test_embedding_refines_at_second_order():
    m = [integrate_embedding(sc.halfspace_grid(h)).metricResidual for h in (1 / 16, 1 / 32)]
    assert 3.4 <= m[0] / m[1] <= 4.6


@pytest.mark.parametrize("r0, t, radius2", [(1.0, 2.0, 3.0), (2.0, 0.0, 4.0)])
def test_gcf_xcf_correspondence(r0, t, radius2):
    out = gcf_xcf_correspondence(r0, t)
    assert out["radius"] ** 2 == pytest.approx(radius2)
    assert out["routes_diff"] <= 1e-12
    assert out["scale_diff"] <= 1e-12
    assert out["radius_ode_diff"] <= 1e-12
    assert out["extrinsic"] == pytest.approx(2.0 / out["radius"] ** 2)


def test_hyperboloid_family():
    fam = HyperboloidFamily(1.0)
    assert fam.radius(0.0) == 1.0
    assert fam.gauss_curvature(2.0) == pytest.approx(3.0 ** -1.5)
    assert fam.sectional(2.0) == pytest.approx(-1.0 / 3.0)


def test_integrability_classification():
    assert is_integrable(sc.halfspace_grid(1 / 16), derivatives="analytic")["integrable"]
    res = is_integrable(sc.perturbed_grid(0.05, -1.0, nodes=9, h=1 / 16), derivatives="analytic")
    assert not res["integrable"] and res["defect"] > 0.1
