"""Scalar monitors along a flow: volumes, the J and I functionals, Harnack, residuals.

Every monitor is assembled from per-state "summaries" holding the spatial
parts of the evolution equations; the time-derivative entries of a row are
centered differences between the neighbouring summaries.  Spatial derivatives
go through a small calculus object so the grid backend (stencils on a padded
pack) and the homogeneous frame backend (constant components, connection
terms only) share the same formulas.
"""

import csv
import io
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import stencil
from .curvature import curvature_pack
from .errors import MismatchedGrids
from .tensors import transform_last2
from .third_order import third_order_pointwise

COLUMNS = ("t", "vol", "intH", "J", "I", "minDetE", "maxTraceCross", "devilL2", "harnackMin",
           "resDtEin", "resDtDetE", "dVolResidual")


@dataclass
class MonitorRow:
    t: float
    vol: float
    intH: float
    J: float
    I: float
    minDetE: float
    maxTraceCross: float
    devilL2: float = None
    harnackMin: float = None
    resDtEin: float = None
    resDtDetE: float = None
    dVolResidual: float = None

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def format_value(v):
    if v is None or not np.isfinite(v):
        return ""
    return format(float(v), ".17g")


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([format_value(v) for v in astuple(r)])
    return buf.getvalue()


# -- spatial calculus ------------------------------------------------------------

class GridCalc:
    """Stencil partials on a padded node block; NaN creeps in from the edges only."""

    def __init__(self, grid, order):
        self.h = grid.h
        self.order = order
        self.pad = 2 * stencil.half_width(order)
        self.mask = grid.interior_mask()

    def d(self, f):
        return stencil.gradient(f, self.h, self.order)

    def nodes(self, f):
        return stencil.crop(f, self.pad)

    def sel(self, f):
        return f[self.mask]


class FrameCalc:
    """Left-invariant data: components are constant, every partial vanishes."""

    pad = 0

    def d(self, f):
        return np.zeros((3,) + np.shape(f))

    def nodes(self, f):
        return f

    def sel(self, f):
        return np.reshape(f, (1,) + np.shape(f))


def _nabla_up2(calc, gamma, t2):
    """nabla_l T^ij for a (2,0)-tensor field."""
    return (calc.d(t2) + np.einsum("...ilm,...mj->...lij", gamma, t2)
            + np.einsum("...jlm,...im->...lij", gamma, t2))


def _nabla_mixed3(calc, gamma, n):
    """nabla_a N_b^ij for N = nabla T^ij."""
    return (calc.d(n) - np.einsum("...mab,...mij->...abij", gamma, n)
            + np.einsum("...iam,...bmj->...abij", gamma, n)
            + np.einsum("...jam,...bim->...abij", gamma, n))


def _hess_scalar(calc, gamma, f):
    df = calc.d(f)
    return df, calc.d(df) - np.einsum("...mab,...m->...ab", gamma, df)


@dataclass
class Summary:
    """Everything a monitor row needs from one state, restricted to monitored nodes."""

    t: float
    shape: tuple
    vol: float
    intH: float
    J: float
    I: float
    minDetE: float
    maxTraceCross: float
    devilL2: float
    Eup: np.ndarray
    detE: np.ndarray
    sqrtE: np.ndarray
    spaceEin: np.ndarray      # right side of the E^ij evolution without the time derivative
    spaceDetE: np.ndarray     # same for det opEin
    gradSqrtE2: np.ndarray    # |grad sqrt(detE)|^2_E / sqrt(detE)


def summarize(pack, calc, t, weight):
    """Monitor ingredients from a (padded) pack; ``weight`` is the quadrature weight on monitored nodes."""
    E, gamma, ginv = pack.Eup, pack.Gamma, pack.ginv
    det = pack.detE
    nE = _nabla_up2(calc, gamma, E)
    nnE = _nabla_mixed3(calc, gamma, nE)
    box_e = np.einsum("...ab,...abij->...ij", E, nnE)
    quad = np.einsum("...lki,...klj->...ij", nE, nE)
    space_ein = box_e - quad - 4.0 * det[..., None, None] * ginv
    dd, hd = _hess_scalar(calc, gamma, det)
    box_d = np.einsum("...ab,...ab->...", E, hd)

    nodes = calc.nodes
    sel = lambda f: calc.sel(nodes(f))
    spd = bool(np.all(sel(pack.lam[..., 0]) > 0))
    d_n = nodes(det)
    H_n = nodes(pack.traceCross)
    trE = np.einsum("...ij,...ij->...", nodes(ginv), nodes(pack.Ein))
    j_int = trE / 3.0 - np.cbrt(d_n)

    devil = None
    space_det = np.full(d_n.shape, np.nan)
    grad_sqrt = np.full(d_n.shape, np.nan)
    sqrt_e = np.sqrt(np.where(d_n > 0, d_n, np.nan))
    i_val = None
    if spd:
        idx = (slice(calc.pad, -calc.pad),) * 3 if calc.pad else ()
        sub = pack.point(idx) if idx else pack
        n_e = nodes(nE)
        nabla_ein = transform_last2(sub.g, n_e)
        field = third_order_pointwise(sub, nabla_ein)
        dd_n = nodes(dd)
        V_n = sub.V
        ti = np.einsum("...ij,...j->...i", sub.Eup, dd_n) / d_n[..., None]
        ti2 = np.einsum("...ij,...i,...j->...", V_n, ti, ti)
        space_det = nodes(box_d) - (0.5 * ti2 - 0.5 * field.devil_norm2 + 2.0 * H_n) * d_n
        grad_sqrt = 0.25 * np.einsum("...ij,...i,...j->...", sub.Eup, dd_n, dd_n) / d_n / sqrt_e
        devil = float(np.sum(calc.sel(field.devil_norm2 * sqrt_e) * weight))
        i_val = float(np.sum(calc.sel(sqrt_e) * weight))
    return Summary(
        t=float(t), shape=np.shape(d_n),
        vol=float(np.sum(weight)), intH=float(np.sum(calc.sel(H_n) * weight)),
        J=float(np.sum(calc.sel(j_int) * weight)), I=i_val,
        minDetE=float(np.min(calc.sel(d_n))), maxTraceCross=float(np.max(calc.sel(H_n))),
        devilL2=devil, Eup=calc.sel(nodes(E)), detE=calc.sel(d_n), sqrtE=calc.sel(sqrt_e),
        spaceEin=calc.sel(nodes(space_ein)), spaceDetE=calc.sel(space_det), gradSqrtE2=calc.sel(grad_sqrt))


def grid_summary(grid, stencil_order=2):
    calc = GridCalc(grid, stencil_order)
    pack = curvature_pack(grid, stencil_order, pad=calc.pad)
    weight = np.sqrt(np.linalg.det(grid.values[calc.mask])) * float(np.prod(grid.h))
    return summarize(pack, calc, grid.t, weight)


def _centered_dt(prev, cur, nxt):
    d0 = cur.t - prev.t
    d1 = nxt.t - cur.t
    if not (d0 > 0 and abs(d1 - d0) <= 1e-9 * max(d0, d1)):
        raise MismatchedGrids(f"states are not equally spaced in time ({d0!r} vs {d1!r})")
    if prev.shape != cur.shape or nxt.shape != cur.shape:
        raise MismatchedGrids("states live on different grids")
    return 0.5 * (d0 + d1)


def residuals_from_summaries(prev, cur, nxt):
    dt = _centered_dt(prev, cur, nxt)
    dE = (nxt.Eup - prev.Eup) / (2 * dt)
    res_e = float(np.max(np.abs(dE - cur.spaceEin)))
    dD = (nxt.detE - prev.detE) / (2 * dt)
    res_d = float(np.max(np.abs(dD - cur.spaceDetE)))
    return res_e, res_d


def row_from_summaries(cur, prev=None, nxt=None):
    row = MonitorRow(t=cur.t, vol=cur.vol, intH=cur.intH, J=cur.J, I=cur.I, minDetE=cur.minDetE,
                     maxTraceCross=cur.maxTraceCross, devilL2=cur.devilL2)
    if prev is None or nxt is None:
        return row
    dt = _centered_dt(prev, cur, nxt)
    row.resDtEin, row.resDtDetE = residuals_from_summaries(prev, cur, nxt)
    row.dVolResidual = abs((nxt.vol - prev.vol) / (2 * dt) - cur.intH)
    if cur.t > 0:
        ds = (nxt.sqrtE - prev.sqrtE) / (2 * dt)
        harn = ds - cur.gradSqrtE2 + 0.75 / cur.t * cur.sqrtE
        if np.all(np.isfinite(harn)):
            row.harnackMin = float(np.min(harn))
    for name in ("resDtEin", "resDtDetE"):
        if not np.isfinite(getattr(row, name)):
            setattr(row, name, None)
    return row


def monitors(state, prev=None, next=None, stencil_order=2):
    """MonitorRow for ``state``; entries needing time differences are None without neighbours."""
    cur = grid_summary(state.metric, stencil_order)
    p = grid_summary(prev.metric, stencil_order) if prev is not None else None
    n = grid_summary(next.metric, stencil_order) if next is not None else None
    return row_from_summaries(cur, p, n)


def evolution_residuals(prev, cur, next, stencil_order=2):
    """(resDtEin, resDtDetE) from three consecutive raw-XCF states."""
    grids = [s.metric for s in (prev, cur, next)]
    if any(g.dims != grids[1].dims or g.spacing != grids[1].spacing for g in grids):
        raise MismatchedGrids("states live on different grids")
    d0 = cur.t - prev.t
    d1 = next.t - cur.t
    if abs(d1 - d0) > 1e-9 * max(abs(d0), abs(d1)):
        raise MismatchedGrids(f"unequal time steps {d0!r} and {d1!r}")
    s = [grid_summary(g, stencil_order) for g in grids]
    return residuals_from_summaries(*s)


class MonitorPipeline:
    """Streams states in, emits a row per state once its successor is known."""

    def __init__(self, dt=None, stencil_order=2, summarizer=None):
        self.dt = dt
        self.order = stencil_order
        self.summarizer = summarizer or (lambda s: grid_summary(s.metric, self.order))
        self.window = []

    def push(self, state):
        self.window.append(self.summarizer(state))
        if len(self.window) == 1:
            return []
        if len(self.window) == 2:
            return [row_from_summaries(self.window[0], None, self.window[1])]
        prev, cur, nxt = self.window
        self.window = self.window[1:]
        return [row_from_summaries(cur, prev, nxt)]

    def finish(self):
        if not self.window:
            return []
        last = self.window[-1]
        self.window = []
        return [row_from_summaries(last)]
