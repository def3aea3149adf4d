"""Method-of-lines evolution of a MetricGrid under the cross curvature flow.

Three right-hand sides share one code path:

* raw XCF            dg/dt = 2 adj Ein
* DeTurck XCF        dg/dt = 2 adj Ein + L_W g,  W^k = g^ij (Gamma^k_ij - Gamma0^k_ij)
* normalized(K)      dg/dt = 2 adj Ein - 2 K^2 g

Time stepping is classical RK4 with a fixed step.  In Dirichlet mode the
outer node layer (and every stencil ghost) follows the family's closed-form
evolution; only interior nodes are integrated.

Optionally the cross term is "balanced" against the family's constant-curvature
background: the stencil error of 2 adj Ein on the background is computed once
and subtracted, so regions where the data is exactly hyperbolic evolve exactly
self-similarly.  Since 2 adj Ein(sigma g) = 2 adj Ein(g) / sigma holds for the
discrete operator too, the correction at time t is the t = 0 one over sigma(t).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import stencil
from .curvature import adjugate_cross, christoffel_lowered, einstein_from_jet, fd_jet
from .errors import CflViolation, EinDegenerate, NonPositiveMetric
from .families import scale_factor
from .grid import DIRICHLET, MetricGrid
from .tensors import inv3, is_spd

VARIANTS = ("raw", "deturck", "normalized")
EIN_FLOOR = 1e-10
DEFAULT_CFL = 0.2


@dataclass(frozen=True)
class FlowState:
    t: float
    step: int
    metric: MetricGrid
    reference: MetricGrid = None
    balance: np.ndarray = None   # background correction of the cross term at t = 0, or None

    @classmethod
    def initial(cls, grid, reference=None, balanced=False, stencil_order=2):
        corr = background_correction(grid, stencil_order) if balanced else None
        return cls(float(grid.t), 0, grid, reference if reference is not None else grid, corr)


def background_correction(grid, stencil_order=2):
    """Exact minus discrete 2 adj Ein of the background family on the grid nodes, at t = 0."""
    bg = grid.family.background if grid.family is not None else None
    if bg is None or grid.boundary != DIRICHLET:
        raise ValueError("balancing needs a Dirichlet grid whose family has a constant-curvature background")
    base = MetricGrid.from_family(bg, grid.dims, grid.spacing, grid.origin)
    _, discrete, _ = _cross_term(base, stencil_order)
    corr = 2.0 * bg.K0 ** 2 * base.values - discrete
    corr[~grid.interior_mask()] = 0.0
    return corr


@dataclass
class RhsInfo:
    """Side products of one RHS evaluation, used by the step guards."""

    min_ein: float     # smallest eigenvalue of opEin over interior nodes
    max_speed: float   # largest eigenvalue of E^ij = g^ia Ein_ab g^bj over interior nodes


def _check_variant(variant, K):
    if variant not in VARIANTS:
        raise ValueError(f"flow variant must be one of {VARIANTS}, got {variant!r}")
    if variant == "normalized" and (K is None or not K < 0):
        raise ValueError("normalized flow needs K < 0")


def _ein_spectra(g, ein):
    """Eigenvalues of opEin (via a Cholesky similarity) and of the coordinate matrix E^ij."""
    linv = np.linalg.inv(np.linalg.cholesky(g))
    s = linv @ ein @ np.swapaxes(linv, -1, -2)
    lam = np.linalg.eigvalsh(0.5 * (s + np.swapaxes(s, -1, -2)))
    ginv = inv3(g)
    up = ginv @ ein @ ginv
    speed = np.linalg.eigvalsh(0.5 * (up + np.swapaxes(up, -1, -2)))
    return lam, speed


def _interior(a, grid):
    if grid.boundary == DIRICHLET:
        return a[1:-1, 1:-1, 1:-1]
    return a


def _cross_term(grid, order, with_info=False):
    g, dg, ddg = fd_jet(grid, order)
    ein = einstein_from_jet(g, dg, ddg)
    info = None
    if with_info:
        lam, speed = _ein_spectra(_interior(g, grid), _interior(ein, grid))
        info = RhsInfo(float(lam[..., 0].min()), float(speed[..., -1].max()))
    return g, 2.0 * adjugate_cross(g, ein), info


def _christoffel_padded(grid, order, pad):
    """Gamma^k_ij on the nodes plus ``pad`` ghost layers (first derivatives only)."""
    s = stencil.half_width(order)
    gp = grid.padded(pad + s)
    dg = stencil.gradient_core(gp, grid.h, order)
    g = stencil.crop(gp, s)
    return g, np.einsum("...kl,...lij->...kij", inv3(g), christoffel_lowered(dg))


def deturck_field(grid, reference, order=2, pad=0):
    """W^k = g^ij (Gamma^k_ij - Gamma0^k_ij) with Gamma0 from the reference metric."""
    g, gamma = _christoffel_padded(grid, order, pad)
    _, gamma0 = _christoffel_padded(reference, order, pad)
    return np.einsum("...ij,...kij->...k", inv3(g), gamma - gamma0)


def lie_derivative_term(grid, reference, order=2):
    """(L_W g)_ij = W^k d_k g_ij + g_kj d_i W^k + g_ik d_j W^k, by finite differences."""
    s = stencil.half_width(order)
    w = deturck_field(grid, reference, order, pad=s)
    dw = stencil.gradient_core(w, grid.h, order)   # dw[..., i, k] = d_i W^k
    dg = stencil.gradient_core(grid.padded(s), grid.h, order)
    g = grid.values
    return (np.einsum("...k,...kij->...ij", stencil.crop(w, s), dg)
            + np.einsum("...kj,...ik->...ij", g, dw)
            + np.einsum("...ik,...jk->...ij", g, dw))


def _apply_boundary_rate(grid, rate, variant, K):
    if grid.boundary != DIRICHLET:
        return rate
    x = grid.coordinates()
    bdry = ~grid.interior_mask()
    rate[bdry] = grid.family.dt_metric(x[bdry], grid.t, _boundary_variant(variant), K)
    return rate


def _boundary_variant(variant):
    # DeTurck boundary data follow the raw solution: the gauge term vanishes on exact hyperbolic data
    return "raw" if variant == "deturck" else variant


def rhs(state, variant="raw", K=None, stencil_order=2, with_info=False):
    """Time derivative of every node value; boundary nodes carry the family's rate."""
    _check_variant(variant, K)
    grid = state.metric
    g, out, info = _cross_term(grid, stencil_order, with_info)
    if state.balance is not None:
        out = out + state.balance / scale_factor(grid.family.background.K0, grid.t, _boundary_variant(variant), K)
    if variant == "deturck":
        out = out + lie_derivative_term(grid, state.reference, stencil_order)
    elif variant == "normalized":
        out = out - 2.0 * K * K * g
    out = _apply_boundary_rate(grid, out, variant, K)
    return (out, info) if with_info else out


def xcf_rhs(state, stencil_order=2):
    return rhs(state, "raw", None, stencil_order)


def deturck_rhs(state, stencil_order=2):
    return rhs(state, "deturck", None, stencil_order)


def normalized_rhs(state, K, stencil_order=2):
    return rhs(state, "normalized", K, stencil_order)


def cfl_dt(info, h, cfl=DEFAULT_CFL):
    """Largest admissible step: cfl * h_min^2 / max eigenvalue of E^ij."""
    return cfl * float(np.min(h)) ** 2 / info.max_speed


def _stage(state, values, t):
    grid = state.metric.with_values(values, t)
    if not np.all(is_spd(values)):
        raise NonPositiveMetric(f"metric lost positive definiteness during a stage at t={t!r}")
    return FlowState(t, state.step, grid, state.reference, state.balance)


def step(state, dt, variant="raw", K=None, stencil_order=2, cfl=DEFAULT_CFL):
    """One classical RK4 step; raises CflViolation or EinDegenerate before stepping."""
    _check_variant(variant, K)
    k1, info = rhs(state, variant, K, stencil_order, with_info=True)
    if info.min_ein < EIN_FLOOR:
        raise EinDegenerate(state.t, info.min_ein)
    limit = cfl_dt(info, state.metric.h, cfl)
    if dt > limit * (1 + 1e-12):
        raise CflViolation(f"dt={dt!r} exceeds the CFL bound {limit!r} at t={state.t!r}")
    g0 = state.metric.values
    t0 = state.t
    k2 = rhs(_stage(state, g0 + 0.5 * dt * k1, t0 + 0.5 * dt), variant, K, stencil_order)
    k3 = rhs(_stage(state, g0 + 0.5 * dt * k2, t0 + 0.5 * dt), variant, K, stencil_order)
    k4 = rhs(_stage(state, g0 + dt * k3, t0 + dt), variant, K, stencil_order)
    new = g0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    new = 0.5 * (new + np.swapaxes(new, -1, -2))
    t1 = t0 + dt
    grid = state.metric
    if grid.boundary == DIRICHLET:
        bdry = ~grid.interior_mask()
        new[bdry] = grid.family.metric(grid.coordinates()[bdry], t1, _boundary_variant(variant), K)
    if not np.all(is_spd(new)):
        raise NonPositiveMetric(f"metric lost positive definiteness at t={t1!r}")
    return FlowState(t1, state.step + 1, grid.with_values(np.ascontiguousarray(new), t1), state.reference,
                     state.balance)


@dataclass
class FlowRun:
    states: list           # every state kept by the run (all of them unless keep='window')
    times: list
    rows: list = field(default_factory=list)   # MonitorRow per time, if monitors were requested
    status: str = "completed"
    dt: float = None


def step_count(t_end, dt):
    """floor(t_end / dt), robust to the rounding of an exact division."""
    return int(math.floor(t_end / dt + 1e-9))


def run(state, t_end, dt=None, variant="raw", K=None, stencil_order=2, cfl=DEFAULT_CFL,
        monitor=True, keep_states=False, on_state=None):
    """Integrate from ``state`` for floor(t_end/dt) fixed steps.

    With ``dt=None`` the step is the CFL step of the initial state, shrunk so
    that it divides ``t_end`` exactly.  The run stops early with status
    'ein-degenerate' or 'cfl-stall' instead of raising.
    """
    from .monitors import MonitorPipeline

    if dt is None:
        _, info = rhs(state, variant, K, stencil_order, with_info=True)
        dt = t_end / math.ceil(t_end / cfl_dt(info, state.metric.h, cfl) - 1e-9)
    nsteps = step_count(t_end, dt)
    pipe = MonitorPipeline(dt, stencil_order) if monitor else None
    out = FlowRun(states=[], times=[], dt=dt)

    def record(s):
        out.times.append(s.t)
        if keep_states:
            out.states.append(s)
        if on_state is not None:
            on_state(s)
        if pipe is not None:
            out.rows.extend(pipe.push(s))

    record(state)
    cur = state
    for k in range(nsteps):
        try:
            cur = step(cur, dt, variant, K, stencil_order, cfl)
        except EinDegenerate as exc:
            out.status = f"ein-degenerate({exc.t!r})"
            break
        except NonPositiveMetric:
            out.status = f"ein-degenerate({cur.t!r})"
            break
        except CflViolation:
            out.status = "cfl-stall"
            break
        record(cur)
    if pipe is not None:
        out.rows.extend(pipe.finish())
    return out
