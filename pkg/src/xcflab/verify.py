"""Verification suites: every checkable identity, convergence rate and monotonicity claim.

A suite returns a report with one entry per check (measured value, threshold,
comparison, pass flag).  Error-type thresholds are multiplied by ``tol_scale``;
convergence-rate bands and sign conditions are not scaled.  Everything is
deterministic for a given seed.
"""

import math

import numpy as np

from . import scenarios as sc
from .curvature import (cross_via_ricciE, curvature_pack, pack_from_einstein, pack_from_jet,
                        ricci_decomposition_residual, sectional)
from .families import SolvableChart
from .flow import FlowState, normalized_rhs, run
from .frame import FrameMetric, frame_curvature, frame_third_order, xcf_ode_run
from .grid import MetricGrid
from .minkowski import (gauss_cross_residual, gauss_residual, gcf_xcf_correspondence, hyperboloid_deviation,
                        integrate_embedding, is_integrable, principal_curvatures, weingarten_from_intrinsic)
from .monitors import MonitorPipeline, evolution_residuals
from .symbol import (BASIS, random_context, random_spd, sampling_report, symbol_context, symbol_deturck, symbol_fd_oracle,
                     symbol_gauge, symbol_ricci, symbol_xcf)
from .third_order import bianchi_cross_residual, codazzi_scale, third_order

SUITES = ("algebraic", "convergence", "monotonicity", "embedding", "symbol")


class Report:
    def __init__(self, tol_scale=1.0):
        self.tol_scale = float(tol_scale)
        self.checks = []
        self.info = []

    def _add(self, name, value, threshold, comparison, ok):
        self.checks.append({"name": name, "value": value, "threshold": threshold,
                            "comparison": comparison, "pass": bool(ok)})

    def at_most(self, name, value, tol, scaled=True):
        thr = tol * self.tol_scale if scaled else tol
        value = float(value)
        self._add(name, value, thr, "<=", value <= thr)

    def at_least(self, name, value, bound):
        value = float(value)
        self._add(name, value, bound, ">=", value >= bound)

    def greater(self, name, value, bound):
        value = float(value)
        self._add(name, value, bound, ">", value > bound)

    def within(self, name, value, lo, hi):
        value = float(value)
        self._add(name, value, [lo, hi], "in", lo <= value <= hi)

    def holds(self, name, value, ok):
        self._add(name, value, None, "holds", ok)

    def note(self, name, value):
        self.info.append({"name": name, "value": value})

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks)


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / max(float(np.max(np.abs(b))), 1e-300))


def random_metric_jet(rng):
    """Seeded random 2-jet (g, dg, ddg) with g SPD and the right index symmetries."""
    g = random_spd(rng)
    dg = rng.normal(size=(3, 3, 3)) * 0.5
    dg = 0.5 * (dg + np.swapaxes(dg, 1, 2))
    ddg = rng.normal(size=(3, 3, 3, 3)) * 0.5
    ddg = 0.5 * (ddg + np.swapaxes(ddg, 0, 1))
    ddg = 0.5 * (ddg + np.swapaxes(ddg, 2, 3))
    return g, dg, ddg


def _spd_ein(rng):
    """Random metric and SPD Einstein tensor."""
    g = random_metric_jet(rng)[0]
    a = rng.normal(size=(3, 3))
    return g, a @ a.T + 0.2 * np.eye(3)


# -- algebraic -------------------------------------------------------------------------

def suite_algebraic(report, seed):
    rng = np.random.default_rng(seed)
    cross, decomp, adj_id, det_id = 0.0, 0.0, 0.0, 0.0
    for _ in range(1000):
        p = pack_from_jet(*random_metric_jet(rng))
        cross = max(cross, _rel(cross_via_ricciE(p), p.adjEin))
        decomp = max(decomp, ricci_decomposition_residual(p))
        # both relative to |lambda|_max^3, the natural size of det and of adj * Ein
        cube = float(np.max(np.abs(p.lam))) ** 3
        endo = np.linalg.solve(p.g, p.adjEin) @ np.linalg.solve(p.g, p.Ein)
        adj_id = max(adj_id, float(np.max(np.abs(endo - p.detE * np.eye(3)))) / cube)
        det_id = max(det_id, abs(p.detE - np.linalg.det(np.linalg.solve(p.g, p.Ein))) / cube)
    report.at_most("cross_via_ricciE_vs_adjugate_1000_jets", cross, 1e-10)
    report.at_most("ricci_decomposition_1000_jets", decomp, 1e-10)
    report.at_most("adjEin_times_Ein_equals_detE", adj_id, 1e-10)
    report.at_most("detE_equals_det_opEin", det_id, 1e-10)

    # diagonal model with lambda = (1, 2, 3)
    p = pack_from_einstein(np.eye(3), np.diag([1.0, 2.0, 3.0]))
    report.at_most("sectional_model_E1E2", abs(sectional(p, 0, 1) + 3.0), 1e-12)
    report.at_most("sectional_model_E2E3", abs(sectional(p, 1, 2) + 1.0), 1e-12)
    report.at_most("cross_model_diag_6_3_2", _rel(cross_via_ricciE(p), np.diag([6.0, 3.0, 2.0])), 1e-12)

    # Devil tensor identities and the Devil/Codazzi identity on the perturbed field (exact jets)
    grid = sc.perturbed_grid()
    pack = curvature_pack(grid, derivatives="analytic")
    field = third_order(grid, pack, derivatives="analytic")
    res = field.identity_residuals(pack.V, grid.interior_mask())
    report.at_most("devil_codazzi_nodewise", res["devil_codazzi"], 1e-8)
    for key in ("antisymmetry", "cyclic", "trace_ij", "trace_ik", "trace_jk"):
        report.at_most(f"devil_{key}", res[key], 1e-10)
    report.greater("devil_nonzero_on_perturbed_field", float(np.max(field.devil_norm2)), 0.0)

    # frame backend
    fm = FrameMetric.solvable()
    p = frame_curvature(fm)
    report.at_most("frame_solvable_sectional_minus_one",
                   max(abs(sectional(p, i, j) + 1.0) for i, j in ((0, 1), (0, 2), (1, 2))), 1e-12)
    report.at_most("frame_solvable_ein_equals_m", float(np.max(np.abs(p.Ein - fm.m))), 1e-12)
    report.at_most("frame_abelian_flat", float(np.max(np.abs(frame_curvature(FrameMetric.abelian(np.diag([1.0, 2.0, 3.0]))).Rm))), 1e-14)
    fm2 = FrameMetric.solvable(np.diag([1.0, 1.0, 4.0]), 2.0)
    p2 = frame_curvature(fm2)
    report.greater("frame_diag114_ein_spd", float(p2.lam[0]), 0.0)
    report.greater("frame_diag114_distinct_eigenvalues", float(np.min(np.diff(p2.lam))), 0.0)
    report.at_most("frame_diag114_cross_routes", _rel(cross_via_ricciE(p2), p2.adjEin), 1e-12)
    scaled = frame_curvature(fm2.with_metric(3.0 * fm2.m))
    report.at_most("frame_scaling_covariance", _rel(scaled.adjEin, p2.adjEin / 3.0), 1e-12)

    # Weingarten dictionary
    p = pack_from_einstein(np.eye(3), np.diag([6.0, 3.0, 2.0]))
    W, A, K = weingarten_from_intrinsic(p)
    report.at_most("weingarten_principal_curvatures_1_2_3",
                   float(np.max(np.abs(principal_curvatures(W, p.g) - [1.0, 2.0, 3.0]))), 1e-12)
    report.at_most("weingarten_gauss_curvature_6", abs(float(K) - 6.0), 1e-12)
    worst = 0.0
    for _ in range(200):
        g, ein = _spd_ein(rng)
        q = pack_from_einstein(g, ein)
        W, _, _ = weingarten_from_intrinsic(q)
        kap = principal_curvatures(W, q.g)
        prods = np.array([kap[1] * kap[2], kap[0] * kap[2], kap[0] * kap[1]])
        worst = max(worst, float(np.max(np.abs(np.sort(prods) - q.lam) / q.lam)))
    report.at_most("kappa_i_kappa_j_equals_lambda_k", worst, 1e-12)

    # Gauss equations with A = Ob
    full, contracted, scalar = gauss_residual(pack, pack.Ob)
    report.at_most("gauss_full_perturbed", full, 1e-10)
    report.at_most("gauss_contracted_perturbed", contracted, 1e-10)
    report.at_most("gauss_scalar_perturbed", scalar, 1e-10)
    bump = np.zeros_like(pack.Ob)
    bump[..., 0, 1] = bump[..., 1, 0] = 0.1 * np.sqrt(pack.g[..., 0, 0] * pack.g[..., 1, 1])
    report.greater("gauss_contracted_detects_wrong_A", gauss_residual(pack, pack.Ob + bump)[1], 1e-3)

    # 2 K A = 2 adj Ein on every negatively curved pack
    worst = gauss_cross_residual(pack)
    for _ in range(200):
        worst = max(worst, gauss_cross_residual(pack_from_einstein(*_spd_ein(rng))))
    report.at_most("two_K_A_equals_two_adjEin", worst, 1e-10)

    # Gauss curvature flow on hyperboloids vs XCF
    routes, scales = 0.0, 0.0
    for r0 in (1.0, 2.0):
        for t in (0.0, 1.0, 2.0):
            rep = gcf_xcf_correspondence(r0, t)
            routes = max(routes, rep["routes_diff"] / abs(rep["intrinsic"]), rep["radius_ode_diff"] / abs(rep["intrinsic"]))
            scales = max(scales, rep["scale_diff"] / rep["xcf_scale"])
    report.at_most("gcf_xcf_routes_agree", routes, 1e-14)
    report.at_most("gcf_induced_metric_is_xcf_solution", scales, 1e-14)


# -- convergence -------------------------------------------------------------------------

def _frame_scale_error(dt, t_end=2.0):
    r = xcf_ode_run(FrameMetric.solvable(), t_end, dt, monitor=False)
    return max(float(np.max(np.abs(s.m / sc.hyperbolic_scale(-1.0, t) - np.eye(3)))) for s, t in zip(r.states, r.times))


def suite_convergence(report, seed):
    report.at_most("frame_exact_hyperbolic_dt1e-3", _frame_scale_error(1e-3), 1e-8)
    e1, e2 = _frame_scale_error(0.1), _frame_scale_error(0.05)
    report.within("frame_rk4_order_ratio", e1 / e2, 12.0, 20.0)
    fr = xcf_ode_run(FrameMetric.solvable(), 10.0, 1e-2, variant="normalized", K=-1.0, monitor=False)
    report.at_most("frame_normalized_fixed_point_drift",
                   max(float(np.max(np.abs(s.m - np.eye(3)))) for s in fr.states), 1e-10)

    # grid backend against the exact hyperbolic solution, plus the volume law on the same run
    grid = sc.hyperbolic_ball_grid()
    g0 = grid.values
    vol_rows = []
    pipe = MonitorPipeline(stencil_order=2)
    err = [0.0]

    def watch(s):
        exact = sc.hyperbolic_scale(-1.0, s.t) * g0
        err[0] = max(err[0], float(np.max(np.abs(s.metric.values - exact) / np.max(np.abs(exact), axis=(-2, -1))[..., None, None])))
        if s.t >= 0.05 - 0.01:
            vol_rows.extend(pipe.push(s))

    out = run(FlowState.initial(grid), 0.1, None, stencil_order=2, monitor=False, on_state=watch)
    vol_rows.extend(pipe.finish())
    report.holds("grid_exact_hyperbolic_run_completed", out.status, out.status == "completed")
    report.at_most("grid_exact_hyperbolic_h1/32", err[0], 1e-3)
    window = [r for r in vol_rows if r.dVolResidual is not None and 0.05 <= r.t <= 0.1 + 1e-12]
    report.at_most("volume_law_dVol_vs_intH", max(r.dVolResidual / r.intH for r in window), 1e-3)
    vol0 = float(np.sum(np.sqrt(np.linalg.det(g0[grid.interior_mask()])))) * float(np.prod(grid.h))
    report.at_most("volume_closed_form", max(abs(r.vol / (vol0 * (4 * r.t + 1) ** 0.75) - 1.0) for r in window), 1e-3)
    report.at_most("intH_closed_form", max(abs(r.intH / (3.0 * vol0 * (4 * r.t + 1) ** -0.25) - 1.0) for r in window), 1e-3)

    # curvature of the K0 = -2 half-space converges at second order
    errs = []
    for h in (1 / 16, 1 / 32):
        g = sc.halfspace_grid(h, K0=-2.0)
        p = curvature_pack(g, 2)
        m = g.interior_mask()
        errs.append(max(_rel(p.Ein[m], 2.0 * p.g[m]), _rel(p.adjEin[m], 4.0 * p.g[m]),
                        float(np.max(np.abs(p.detE[m] - 8.0))) / 8.0))
    report.within("curvature_K0_-2_refinement_ratio", errs[0] / errs[1], 3.4, 4.6)
    report.at_most("curvature_K0_-2_ricci_decomposition", ricci_decomposition_residual(p), 1e-10)

    # normalized flow: hyperbolic data of curvature K is a fixed point of the rhs
    g = sc.halfspace_grid(1 / 32, K0=-1.0)
    r = normalized_rhs(FlowState.initial(g), K=-1.0)
    report.at_most("normalized_rhs_fixed_point_h1/32", float(np.max(np.abs(r[g.interior_mask()]))), 1e-2)

    # Bianchi-type identity under refinement
    fam = sc.refinement_family()
    for order, band in ((2, (3.4, 4.6)), (4, (10.0, 22.0))):
        res = [bianchi_cross_residual(sc.refinement_grid(fam, h), stencil_order=order) for h in (1 / 16, 1 / 32)]
        report.within(f"bianchi_refinement_ratio_order{order}", res[0] / res[1], *band)

    # evolution-equation residuals on the constant-curvature run
    res = []
    for h in (1 / 16, 1 / 32):
        states = sc.three_states(sc.hyperbolic_ball_grid(h), order=4, balanced=True)
        res.append(evolution_residuals(*states, stencil_order=4))
    report.at_most("resDtEin_constant_curvature_h1/32", res[1][0], 1e-3)
    report.at_most("resDtDetE_constant_curvature_h1/32", res[1][1], 1e-3)
    report.at_least("resDtEin_refinement_ratio", res[0][0] / res[1][0], 3.4)
    report.at_least("resDtDetE_refinement_ratio", res[0][1] / res[1][1], 3.4)


# -- monotonicity --------------------------------------------------------------------------

def _stepwise(values, sign):
    """Worst violation of step-wise monotonicity, relative to the 1e-6 max(1, |value|) allowance."""
    worst = -np.inf
    for a, b in zip(values, values[1:]):
        allow = 1e-6 * max(1.0, abs(a))
        worst = max(worst, (sign * (b - a)) / allow)
    return worst


def check_monotone_run(report, rows, prefix, dI_band=True):
    J = [r.J for r in rows]
    I = [r.I for r in rows]
    # J(t_k+1) <= J(t_k) + tol, I(t_k+1) >= I(t_k) - tol; reported as multiples of tol
    report.at_most(f"{prefix}_J_increase_over_tol", _stepwise(J, +1), 1.0, scaled=False)
    report.at_most(f"{prefix}_I_decrease_over_tol", _stepwise(I, -1), 1.0, scaled=False)
    report.greater(f"{prefix}_minDetE", min(r.minDetE for r in rows), 0.0)
    if dI_band:
        worst = 0.0
        for k in range(1, len(rows) - 1):
            dt = rows[k + 1].t - rows[k - 1].t
            dI = (rows[k + 1].I - rows[k - 1].I) / dt
            q = 0.25 * rows[k].devilL2
            worst = max(worst, abs(dI - q) / max(abs(dI), q, 1e-12))
        report.at_most(f"{prefix}_dIdt_vs_quarter_devilL2", worst, 1e-2)


def suite_monotonicity(report, seed):
    p = sc.PERTURBED
    out = sc.standard_run()
    report.holds("standard_run_completed", out.status, out.status == "completed")
    report.holds("standard_run_row_count", len(out.rows), len(out.rows) == int(math.floor(p["t_end"] / p["dt"] + 1e-9)) + 1)
    check_monotone_run(report, out.rows, "standard_run")
    report.greater("standard_run_devilL2_positive", min(r.devilL2 for r in out.rows), 0.0)

    # equality case: the constant-curvature background of the same run
    flat = sc.standard_run(sc.background_grid())
    vol = flat.rows[0].vol
    report.at_most("constant_curvature_J_density", max(abs(r.J) for r in flat.rows) / vol, 1e-6)
    I0 = flat.rows[0].I
    report.at_most("constant_curvature_I_drift", max(abs(r.I / I0 - 1.0) for r in flat.rows), 1e-8)
    report.at_most("constant_curvature_devilL2_vs_standard",
                   max(r.devilL2 for r in flat.rows) / min(r.devilL2 for r in out.rows), 1e-2)

    # homogeneous runs: Harnack on integrable solutions and the spot value
    run1 = xcf_ode_run(FrameMetric.solvable(), 2.0, 1e-3)
    harn = [r.harnackMin for r in run1.monitors if r.harnackMin is not None and r.t >= 0.5 - 1e-12]
    report.at_least("frame_harnackMin_t_0.5_to_2", min(harn), -1e-6 * report.tol_scale)
    spot = [r.harnackMin for r in run1.monitors if abs(r.t - 1.0) < 1e-9][0]
    report.at_most("frame_harnack_spot_t1", abs(spot - 5 ** -0.75 * (0.75 - 0.6)), 1e-6)
    run2 = xcf_ode_run(FrameMetric.solvable(np.diag([1.0, 1.0, 1.2])), 2.0, 1e-3)
    harn = [r.harnackMin for r in run2.monitors if r.harnackMin is not None and r.t >= 0.5 - 1e-12]
    report.at_least("frame_diag1_1_1.2_harnackMin", min(harn), -1e-6 * report.tol_scale)
    check_monotone_run(report, run2.monitors, "frame_diag1_1_1.2", dI_band=False)
    report.at_most("frame_diag1_1_1.2_J_zero", max(abs(r.J) for r in run2.monitors), 1e-10)
    # non-unimodular algebra: reported only, the group has no compact quotient
    run3 = xcf_ode_run(FrameMetric.solvable(np.diag([1.0, 1.0, 1.2]), 2.0), 0.5, 1e-2)
    report.note("nonunimodular_a2_J_first_last", [run3.monitors[0].J, run3.monitors[-1].J])
    report.note("nonunimodular_a2_I_first_last", [run3.monitors[0].I, run3.monitors[-1].I])


# -- embedding ------------------------------------------------------------------------------

def suite_embedding(report, seed):
    states = {h: integrate_embedding(sc.halfspace_grid(h)) for h in (1 / 16, 1 / 32, 1 / 64)}
    dev, _ = hyperboloid_deviation(states[1 / 32].F)
    report.at_most("hyperboloid_fit_deviation_h1/32", dev, 1e-3)
    for key in ("metricResidual", "pathResidual"):
        a, b, c = (getattr(states[h], key) for h in (1 / 16, 1 / 32, 1 / 64))
        report.at_most(f"{key}_h1/32", b, 1e-3)
        report.within(f"{key}_ratio_16_32", a / b, 3.4, 4.6)
        report.within(f"{key}_ratio_32_64", b / c, 3.4, 4.6)
    report.at_most("normalResidual_h1/32", states[1 / 32].normalResidual, 1e-3)

    sweep = [integrate_embedding(sc.perturbed_grid(eps)).pathResidual for eps in (0.02, 0.05, 0.1)]
    report.holds("pathResidual_increases_with_eps", sweep, sweep[0] < sweep[1] < sweep[2])

    cc = is_integrable(sc.halfspace_grid(1 / 32), 1e-6, derivatives="analytic")
    report.holds("constant_curvature_integrable", cc["defect"], cc["integrable"])
    fd = [is_integrable(sc.halfspace_grid(h), 1e-6)["defect"] for h in (1 / 16, 1 / 32)]
    report.within("constant_curvature_fd_defect_ratio", fd[0] / fd[1], 3.4, 4.6)
    pert = is_integrable(sc.perturbed_grid(0.1), 1e-6)
    report.holds("perturbed_eps0.1_not_integrable", pert["defect"], not pert["integrable"])
    report.greater("perturbed_eps0.1_defect", pert["defect"], 1e-3)

    fm = FrameMetric.solvable(np.diag([1.0, 1.0, 4.0]), 2.0)
    alg = float(np.sqrt(frame_third_order(fm).defect_norm2))
    chart = MetricGrid.centered(SolvableChart(fm.m, 2.0), 9, 1 / 8)
    res = is_integrable(chart, 1e-6, derivatives="analytic")
    fp = frame_curvature(fm)
    f_int = alg <= 1e-6 * codazzi_scale(fp, frame_third_order(fm, fp))
    report.at_most("solvable_chart_defect_vs_frame", abs(res["defect"] - alg) / alg, 1e-8)
    report.holds("solvable_chart_classification_matches", res["integrable"], res["integrable"] == f_int)


# -- symbol -----------------------------------------------------------------------------------

def suite_symbol(report, seed, samples=10000, kernel_samples=1000):
    rep = sampling_report(kernel_samples, seed)
    report.holds("xcf_kernel_dim_histogram", rep["xcf_kernel_dim_histogram"],
                 rep["xcf_kernel_dim_histogram"] == {"3": kernel_samples})
    big = sampling_report(samples, seed + 1)
    report.greater("deturck_min_real_part", big["deturck_min_real_part"], 0.0)
    report.note("deturck_min_real_part_over_xi_E2", big["deturck_min_real_part_over_xi_E2"])

    rng = np.random.default_rng(seed)
    ricci, consist, homog = 0.0, 0.0, 0.0
    for _ in range(kernel_samples):
        g, E, xi = random_context(rng)
        raw, _ = symbol_ricci(g, xi)
        n2 = xi @ np.linalg.solve(g, xi)
        # raw Ricci plus the gauge term must collapse to |xi|^2 times the identity
        ricci = max(ricci, float(np.max(np.abs(raw.M + symbol_gauge(g, xi).M - n2 * np.eye(6)))) / n2)
        diff = symbol_deturck(g, E, xi).M - symbol_xcf(g, E, xi).M
        consist = max(consist, float(np.max(np.abs(diff - symbol_gauge(g, xi).M))))
        homog = max(homog, _rel(symbol_xcf(g, E, 2 * xi).M, 4 * symbol_xcf(g, E, xi).M),
                    _rel(symbol_deturck(g, E, 2 * xi).M, 4 * symbol_deturck(g, E, xi).M),
                    _rel(symbol_gauge(g, 2 * xi).M, 4 * symbol_gauge(g, xi).M))
    report.at_most("deturck_ricci_is_identity_times_xi2", ricci, 1e-12)
    report.at_most("deturck_minus_xcf_equals_gauge", consist, 1e-12)
    report.at_most("degree_two_homogeneity", homog, 1e-14)

    S = symbol_xcf(np.eye(3), np.eye(3), [1.0, 0.0, 0.0])
    e = np.zeros(6)
    e[0] = e[3] = 1.0
    report.at_most("hand_case_e22", float(np.max(np.abs(S.apply(BASIS[3]) - e))), 1e-15)
    raw, _ = symbol_ricci(np.eye(3), [0.0, 1.0, 0.0])
    report.at_most("hand_case_ricci_e22", float(np.max(np.abs(raw.apply(BASIS[3])))), 1e-15)

    # finite-difference linearization against the closed-form symbol
    worst, kern = 0.0, 0.0
    for fam, x0 in ((sc.halfspace_grid(1 / 16).family, (0.1, -0.2, 1.4)),
                    (sc.perturbed_family(0.05, -1.0), (0.1, 0.05, 0.0))):
        g, E = symbol_context(fam, x0)
        xi = np.array([0.3, -1.0, 0.5])
        M = symbol_xcf(g, E, xi).M
        for k, B in enumerate(BASIS):
            est = symbol_fd_oracle(fam, x0, xi, B)
            worst = max(worst, float(np.max(np.abs(est - M[:, k]))) / float(np.max(np.abs(M[:, k]))))
        om = np.array([1.0, 2.0, 0.3])
        V = 0.5 * (np.outer(xi, om) + np.outer(om, xi))
        kern = max(kern, float(np.max(np.abs(symbol_fd_oracle(fam, x0, xi, V)))) / float(np.max(np.abs(M))))
    report.at_most("fd_oracle_matches_symbol_columns", worst, 1e-2)
    report.at_most("fd_oracle_kernel_direction", kern, 1e-6)


RUNNERS = {"algebraic": suite_algebraic, "convergence": suite_convergence, "monotonicity": suite_monotonicity,
           "embedding": suite_embedding, "symbol": suite_symbol}


def verify(suite="all", tol_scale=1.0, seed=0):
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    out = {"suite": suite, "tol_scale": float(tol_scale), "seed": int(seed), "suites": {}}
    ok = True
    for name in names:
        rep = Report(tol_scale)
        RUNNERS[name](rep, int(seed))
        out["suites"][name] = {"passed": rep.passed, "checks": rep.checks, "info": rep.info}
        ok = ok and rep.passed
    out["passed"] = ok
    return out
