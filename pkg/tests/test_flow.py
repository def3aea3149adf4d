import numpy as np
import pytest

from xcflab import scenarios as sc
from xcflab.errors import CflViolation, MismatchedGrids
from xcflab.families import Flat, HyperbolicBall, PulledBack
from xcflab.flow import (FlowState, deturck_rhs, lie_derivative_term, normalized_rhs, rhs, run, step, step_count,
                         xcf_rhs)
from xcflab.grid import MetricGrid
from xcflab.monitors import evolution_residuals


def interior(a):
    return a[1:-1, 1:-1, 1:-1]


@pytest.mark.parametrize("K0", [-1.0, -2.0])
def test_raw_rhs_on_constant_curvature(K0):
    # dg/dt = 2 K0^2 g on a space form, up to the stencil error
    errs = []
    for h in (1 / 16, 1 / 32):
        grid = sc.halfspace_grid(h, K0)
        out = xcf_rhs(FlowState.initial(grid))
        g = grid.values
        errs.append(np.max(np.abs(interior(out - 2 * K0 ** 2 * g) / interior(g[..., :1, :1]))) / (2 * K0 ** 2))
    assert errs[1] < 5e-3
    assert 3.4 <= errs[0] / errs[1] <= 4.6


def test_balanced_rhs_is_exact_on_background():
    grid = sc.hyperbolic_ball_grid(1 / 16)
    out = xcf_rhs(FlowState.initial(grid, balanced=True))
    np.testing.assert_allclose(out, 2.0 * grid.values, rtol=1e-12)


def test_normalized_rhs_fixed_point_and_scaling():
    grid = sc.hyperbolic_ball_grid(1 / 16)
    state = FlowState.initial(grid, balanced=True)
    np.testing.assert_allclose(normalized_rhs(state, -1.0), 0.0, atol=1e-11 * np.max(grid.values))
    # normalizing with 2K instead rescales the fixed point: 2g - 8g
    np.testing.assert_allclose(interior(normalized_rhs(state, -2.0)), interior(-6.0 * grid.values), rtol=1e-12)
    with pytest.raises(ValueError):
        normalized_rhs(state, 1.0)


def test_normalized_rhs_off_the_fixed_point():
    # data of curvature 2K under normalization K: 2 (2K)^2 g - 2 K^2 g = 6 K^2 g
    grid = sc.hyperbolic_ball_grid(1 / 16, K0=-2.0)
    out = normalized_rhs(FlowState.initial(grid, balanced=True), -1.0)
    np.testing.assert_allclose(interior(out), interior(6.0 * grid.values), rtol=1e-12)
    flat = MetricGrid.centered(Flat(), 7, 0.1)
    out = normalized_rhs(FlowState.initial(flat), -1.0)
    np.testing.assert_allclose(interior(out), interior(-2.0 * flat.values), atol=1e-12)


def test_flat_rhs_vanishes_and_is_flagged():
    state = FlowState.initial(MetricGrid.centered(Flat(), 7, 0.1))
    out, info = rhs(state, with_info=True)
    np.testing.assert_allclose(out, 0.0, atol=1e-12)
    assert info.min_ein < 1e-10
    res = run(state, 0.01, 0.001, monitor=False)
    assert res.status.startswith("ein-degenerate")
    assert len(res.times) == 1


def test_cfl_violation_raises_and_stalls_runs():
    state = FlowState.initial(sc.hyperbolic_ball_grid(1 / 16))
    limit = sc.cfl_step(state, 2)
    with pytest.raises(CflViolation):
        step(state, 2 * limit)
    res = run(state, 10 * limit, 2 * limit, monitor=False)
    assert res.status == "cfl-stall"


def test_step_count_is_floor():
    assert step_count(0.05, 5e-3) == 10
    assert step_count(0.051, 5e-3) == 10
    assert step_count(1.0, 0.3) == 3


def test_deturck_minus_raw_is_lie_term():
    ref = sc.hyperbolic_ball_grid(1 / 16)
    grid = MetricGrid.centered(PulledBack(HyperbolicBall(-1.0), amplitude=0.02, width=0.1), ref.dims[0], 1 / 16)
    state = FlowState.initial(grid, reference=ref)
    diff = interior(deturck_rhs(state) - xcf_rhs(state))
    np.testing.assert_allclose(diff, interior(lie_derivative_term(grid, ref)), atol=1e-12 * np.max(np.abs(diff)))
    assert np.max(np.abs(diff)) > 1e-3


def test_gauge_field_vanishes_against_itself():
    grid = MetricGrid.centered(Flat(), 7, 0.1)
    np.testing.assert_allclose(lie_derivative_term(grid, grid), 0.0, atol=1e-14)
    ball = sc.hyperbolic_ball_grid(1 / 16)
    np.testing.assert_allclose(lie_derivative_term(ball, ball), 0.0, atol=1e-14)


def test_hyperbolic_run_is_self_similar():
    grid = sc.hyperbolic_ball_grid(1 / 16)
    res = run(FlowState.initial(grid, balanced=True), 0.02, 2e-3, monitor=False, keep_states=True)
    assert res.status == "completed" and len(res.states) == 11
    sigma = sc.hyperbolic_scale(-1.0, 0.02)
    # what is left is the RK4 time error of the scalar ODE
    np.testing.assert_allclose(res.states[-1].metric.values, sigma * grid.values, rtol=1e-8,
                               atol=1e-10 * np.max(grid.values))


def test_run_rows_match_states():
    res = run(FlowState.initial(sc.hyperbolic_ball_grid(1 / 16), balanced=True), 0.01, 2e-3)
    assert len(res.rows) == len(res.times) == 6
    assert [r.t for r in res.rows] == res.times
    assert res.rows[0].resDtEin is None and res.rows[1].resDtEin is not None
    vol = [r.vol for r in res.rows]
    assert np.all(np.diff(vol) > 0)


def test_evolution_residuals_reject_mismatched_states():
    s0, s1, s2 = sc.three_states(sc.hyperbolic_ball_grid(1 / 16))
    with pytest.raises(MismatchedGrids):
        evolution_residuals(s0, s1, s1)
    other = FlowState.initial(sc.hyperbolic_ball_grid(1 / 16, half_width=0.25))
    with pytest.raises(MismatchedGrids):
        evolution_residuals(s0, other, s2)


@pytest.mark.slow
def test_deturck_and_raw_runs_agree_on_gauge_invariants():
    # pulling the hyperbolic metric back by a near-identity diffeomorphism changes coordinates, not geometry;
    # DeTurck flow from the pulled-back data must reproduce the raw monitors of the unperturbed chart
    h, n = 1 / 32, 17
    ref = MetricGrid.centered(HyperbolicBall(-1.0), n, h)
    pulled = MetricGrid.centered(PulledBack(HyperbolicBall(-1.0), amplitude=0.02, width=0.1), n, h)
    a = run(FlowState.initial(ref), 5e-4, 5e-5)
    b = run(FlowState.initial(pulled, reference=ref), 5e-4, 5e-5, variant="deturck")
    assert a.status == b.status == "completed"
    assert len(a.rows) == len(b.rows) == 11
    for ra, rb in zip(a.rows, b.rows):
        assert abs(ra.vol - rb.vol) <= 1e-4 * abs(ra.vol)
        assert abs(ra.intH - rb.intH) <= 1e-2 * abs(ra.intH)
        assert abs(ra.I - rb.I) <= 1e-2 * abs(ra.I)
        assert abs(ra.J - rb.J) <= 1e-2


@pytest.mark.slow
def test_perturbed_residuals_decrease_under_refinement():
    # the compact bump is steep at its rim, so these resolutions are still pre-asymptotic
    res = []
    for h, n in ((1 / 16, 17), (1 / 32, 33)):
        states = sc.three_states(sc.perturbed_grid(0.05, -0.25, n, h), order=2, balanced=True)
        res.append(evolution_residuals(*states, stencil_order=2))
    assert res[1][0] < res[0][0] and res[1][1] < res[0][1]
    assert max(res[1]) < 2e-3


@pytest.mark.slow
def test_perturbed_run_fifty_steps_keeps_einstein_positive():
    state = FlowState.initial(sc.perturbed_grid(0.05, -0.25, 17, 1 / 16), balanced=True)
    dt = sc.cfl_step(state, 2)
    res = run(state, 50 * dt, dt)
    assert res.status == "completed"
    assert len(res.rows) == 51
    assert all(r.minDetE > 0 for r in res.rows)
