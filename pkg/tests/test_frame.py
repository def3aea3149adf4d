import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xcflab.curvature import cross_via_ricciE, curvature_pack, sectional
from xcflab.errors import EinDegenerate, JacobiViolation, NonPositiveMetric
from xcflab.families import SolvableChart
from xcflab.frame import FrameMetric, frame_curvature, frame_third_order, koszul_connection, ode_step, xcf_ode_run
from xcflab.grid import MetricGrid
from xcflab.symbol import random_spd

seeds = st.integers(0, 2 ** 32 - 1)


def test_solvable_hyperbolic_identity_metric():
    fm = FrameMetric.solvable()
    p = frame_curvature(fm)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert sectional(p, i, j) == pytest.approx(-1.0, abs=1e-12)
    np.testing.assert_allclose(p.Ein, fm.m, atol=1e-12)


def test_abelian_is_flat():
    p = frame_curvature(FrameMetric.abelian(np.diag([1.0, 2.0, 5.0])))
    assert np.max(np.abs(p.Rm)) == 0.0


def test_solvable_diag114_distinct_spd():
    fm = FrameMetric.solvable(np.diag([1.0, 1.0, 4.0]), a=2.0)
    p = frame_curvature(fm)
    assert p.lam[0] > 0 and np.all(np.diff(p.lam) > 1e-3)
    np.testing.assert_allclose(p.lam, [0.25, 0.5, 1.0], atol=1e-12)
    np.testing.assert_allclose(cross_via_ricciE(p), p.adjEin, atol=1e-12)
    assert frame_third_order(fm, p).defect_norm2 > 0.01


def test_levi_civita_is_metric_and_torsion_free():
    rng = np.random.default_rng(5)
    fm = FrameMetric.solvable(random_spd(rng), a=1.7)
    G = koszul_connection(fm)
    # torsion: nabla_i e_j - nabla_j e_i = [e_i, e_j]
    np.testing.assert_allclose(G - np.swapaxes(G, 1, 2), fm.c, atol=1e-12)
    # metric compatibility for left-invariant fields: <nabla_i e_j, e_k> + <e_j, nabla_i e_k> = 0
    low = np.einsum("lij,lk->ijk", G, fm.m)
    np.testing.assert_allclose(low + np.swapaxes(low, 1, 2), 0.0, atol=1e-12)


@given(seeds, st.floats(1.0, 3.0))
def test_scaling_covariance(seed, r):
    fm = FrameMetric.solvable(random_spd(np.random.default_rng(seed)), a=2.0)
    p = frame_curvature(fm)
    q = frame_curvature(fm.with_metric(r * fm.m))
    np.testing.assert_allclose(q.adjEin, p.adjEin / r, rtol=1e-10, atol=1e-12)


@given(seeds)
def test_hyperbolic_algebra_is_constant_curvature(seed):
    # every left-invariant metric on the a = 1 algebra is hyperbolic
    p = frame_curvature(FrameMetric.solvable(random_spd(np.random.default_rng(seed)), a=1.0))
    np.testing.assert_allclose(p.lam, p.lam[0], rtol=1e-10)


@given(seeds, st.floats(0.2, 3.0))
def test_solvable_family_satisfies_jacobi(seed, a):
    fm = FrameMetric.solvable(random_spd(np.random.default_rng(seed)), a)
    assert fm.jacobi_residual() <= 1e-12


def test_jacobi_violation():
    c = np.zeros((3, 3, 3))
    # [e1, e2] = e3, [e2, e3] = e2 violates Jacobi
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
    c[1, 1, 2], c[1, 2, 1] = 1.0, -1.0
    fm = FrameMetric(c, np.eye(3))
    assert fm.jacobi_residual() > 1e-3
    with pytest.raises(JacobiViolation):
        frame_curvature(fm)


def test_frame_metric_validation():
    with pytest.raises(ValueError):
        FrameMetric(np.ones((3, 3, 3)), np.eye(3))
    with pytest.raises(NonPositiveMetric):
        FrameMetric.solvable(-np.eye(3))


def test_frame_json_roundtrip():
    fm = FrameMetric.solvable(np.diag([1.0, 2.0, 3.0]), 2.0)
    doc = json.loads(fm.to_json())
    assert doc["kind"] == "frame" and len(doc["c"]) == 27 and len(doc["m"]) == 6
    back = FrameMetric.from_json(fm.to_json())
    assert np.array_equal(back.c, fm.c) and np.array_equal(back.m, fm.m)


@pytest.mark.parametrize("m, a", [(np.eye(3), 1.0), (np.diag([1.0, 1.0, 4.0]), 2.0),
                                  (np.array([[1.0, 0.2, 0.1], [0.2, 1.5, 0.0], [0.1, 0.0, 2.0]]), 2.0)])
def test_frame_matches_chart_realization(m, a):
    chart = MetricGrid.centered(SolvableChart(m, a), 5, 0.05, center=(0.1, -0.2, 0.3))
    exact = curvature_pack(chart, derivatives="analytic")
    p = frame_curvature(FrameMetric.solvable(m, a))
    # chart components are frame components pushed by the frame vectors e_j = F[:, j]
    F = SolvableChart(m, a).frame_vectors(chart.coordinates())
    Fi = np.linalg.inv(F)
    ein_frame = np.einsum("...ai,...ab,...bj->...ij", F, exact.Ein, F)
    np.testing.assert_allclose(ein_frame, np.broadcast_to(p.Ein, ein_frame.shape), atol=1e-11)
    np.testing.assert_allclose(exact.lam, np.broadcast_to(p.lam, exact.lam.shape), atol=1e-11)
    assert Fi.shape == F.shape


def test_frame_matches_chart_with_stencils():
    m = np.diag([1.0, 1.0, 4.0])
    errs = []
    for h in (1 / 16, 1 / 32):
        chart = MetricGrid.centered(SolvableChart(m, 2.0), 7, h)
        errs.append(np.max(np.abs(curvature_pack(chart, 2).lam - frame_curvature(FrameMetric.solvable(m, 2.0)).lam)))
    assert errs[1] < 5e-3
    assert 3.4 <= errs[0] / errs[1] <= 4.6


# -- ODE runs ---------------------------------------------------------------------------

def test_exact_hyperbolic_solution():
    run = xcf_ode_run(FrameMetric.solvable(), 2.0, 1e-3, monitor=False)
    assert run.status == "completed"
    assert len(run.times) == 2001
    np.testing.assert_allclose(run.states[-1].m, 3.0 * np.eye(3), rtol=1e-8)
    assert np.all(np.diff(run.times) > 0)


def test_rk4_order():
    def err(dt):
        r = xcf_ode_run(FrameMetric.solvable(), 2.0, dt, monitor=False)
        return np.max(np.abs(r.states[-1].m - 3.0 * np.eye(3)))
    assert err(0.1) / err(0.05) == pytest.approx(16.0, rel=0.15)


def test_normalized_fixed_point():
    run = xcf_ode_run(FrameMetric.solvable(), 10.0, 1e-2, variant="normalized", K=-1.0)
    assert max(np.max(np.abs(s.m - np.eye(3))) for s in run.states) <= 1e-10
    assert len(run.monitors) == len(run.states)
    assert max(abs(r.J) for r in run.monitors) <= 1e-10


def test_monotone_functionals_on_diag_112():
    run = xcf_ode_run(FrameMetric.solvable(np.diag([1.0, 1.0, 1.2])), 1.0, 1e-2)
    J = np.array([r.J for r in run.monitors])
    I = np.array([r.I for r in run.monitors])
    assert np.all(np.diff(J) <= 1e-6 * np.maximum(1.0, np.abs(J[:-1])))
    assert np.all(np.diff(I) >= -1e-6 * np.maximum(1.0, np.abs(I[:-1])))


def test_harnack_spot_value():
    run = xcf_ode_run(FrameMetric.solvable(), 1.0 + 1e-3, 1e-3)
    row = [r for r in run.monitors if abs(r.t - 1.0) < 1e-9][0]
    assert row.harnackMin == pytest.approx(5 ** -0.75 * (0.75 - 0.6), abs=1e-6)


def test_normalized_needs_negative_K():
    with pytest.raises(ValueError):
        xcf_ode_run(FrameMetric.solvable(), 1.0, 0.1, variant="normalized", K=1.0)
    with pytest.raises(ValueError):
        xcf_ode_run(FrameMetric.solvable(), 1.0, 0.1, variant="deturck")


def test_degenerate_einstein_is_reported():
    with pytest.raises(EinDegenerate):
        ode_step(FrameMetric.abelian(), 0.1)
    run = xcf_ode_run(FrameMetric.abelian(), 1.0, 0.1, monitor=False)
    assert run.status == "ein-degenerate(0.0)"
    assert len(run.states) == 1
