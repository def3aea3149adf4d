"""Left-invariant metrics on a 3D Lie group: curvature by the Koszul formula, XCF as a matrix ODE.

A left-invariant metric is fixed by structure constants ``c[k, i, j] = c^k_ij``
with [e_i, e_j] = c^k_ij e_k and the Gram matrix ``m`` of the frame.  Every
curvature quantity is then constant on the group, so the flow reduces to an
ODE for the six entries of ``m``.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import adjugate_cross, pack_from_riemann
from .errors import EinDegenerate, JacobiViolation, NonPositiveMetric
from .grid import dumps
from .tensors import inv3, is_spd, sym_to_vec, vec_to_sym
from .third_order import covariant_2form, third_order_pointwise

JACOBI_TOL = 1e-12
EIN_FLOOR = 1e-10


@dataclass(frozen=True)
class FrameMetric:
    c: np.ndarray   # c[k, i, j] = c^k_ij
    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(3, 3, 3))
        object.__setattr__(self, "m", np.asarray(self.m, dtype=float).reshape(3, 3))
        if not np.allclose(self.c, -np.swapaxes(self.c, 1, 2), atol=0.0, rtol=0.0):
            raise ValueError("structure constants must be antisymmetric in the lower indices")
        if not np.allclose(self.m, self.m.T, rtol=0.0, atol=1e-14):
            raise ValueError("frame metric must be symmetric")
        if not is_spd(self.m):
            raise NonPositiveMetric("frame metric is not positive definite")

    @classmethod
    def solvable(cls, m=np.eye(3), a=1.0):
        """[e3, e1] = e1, [e3, e2] = a e2; a = 1 is the hyperbolic algebra."""
        c = np.zeros((3, 3, 3))
        c[0, 2, 0], c[0, 0, 2] = 1.0, -1.0
        c[1, 2, 1], c[1, 1, 2] = a, -a
        return cls(c, m)

    @classmethod
    def abelian(cls, m=np.eye(3)):
        return cls(np.zeros((3, 3, 3)), m)

    def with_metric(self, m):
        return FrameMetric(self.c, m)

    def jacobi_residual(self):
        """max |[[e_i, e_j], e_k] + cyclic| over all index triples."""
        c = self.c
        t = np.einsum("lij,mlk->mijk", c, c)
        cyc = t + np.einsum("mjki->mijk", t) + np.einsum("mkij->mijk", t)
        return float(np.max(np.abs(cyc)))

    def check_jacobi(self, tol=JACOBI_TOL):
        r = self.jacobi_residual()
        if r > tol:
            raise JacobiViolation(f"Jacobi identity violated by {r:.3e}")

    def to_json(self):
        return dumps({"kind": "frame", "c": self.c.reshape(-1).tolist(), "m": sym_to_vec(self.m).tolist()})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text) if isinstance(text, str) else text
        if doc.get("kind") != "frame":
            raise ValueError("not a frame metric document")
        return cls(np.asarray(doc["c"], dtype=float).reshape(3, 3, 3), vec_to_sym(np.asarray(doc["m"], dtype=float)))


def koszul_connection(fm):
    """Gamma[k, i, j] with nabla_{e_i} e_j = Gamma^k_ij e_k.

    2 <nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y> for left-invariant fields.
    """
    C = np.einsum("lab,ld->abd", fm.c, fm.m)   # C[a, b, d] = <[e_a, e_b], e_d>
    low = 0.5 * (C - np.einsum("jki->ijk", C) + np.einsum("kij->ijk", C))
    return np.einsum("kl,ijl->kij", inv3(fm.m), low)


def frame_riemann(fm, gamma=None):
    """Riem[a, b, c, f]: Rm(e_a, e_b) e_c = R^f e_f, with the bracket term of the frame."""
    if gamma is None:
        gamma = koszul_connection(fm)
    return (np.einsum("dbc,fad->abcf", gamma, gamma) - np.einsum("dac,fbd->abcf", gamma, gamma)
            - np.einsum("dab,fdc->abcf", fm.c, gamma))


def frame_curvature(fm):
    """CurvaturePack (single point) of a left-invariant metric."""
    fm.check_jacobi()
    gamma = koszul_connection(fm)
    return pack_from_riemann(fm.m, inv3(fm.m), gamma, frame_riemann(fm, gamma))


def frame_third_order(fm, pack=None):
    """Third-order field of a left-invariant metric: only connection terms survive in nabla Ein."""
    if pack is None:
        pack = frame_curvature(fm)
    nabla = covariant_2form(np.zeros((3, 3, 3)), pack.Ein, pack.Gamma)
    return third_order_pointwise(pack, nabla)


def frame_rhs(fm, variant="raw", K=None):
    pack = frame_curvature(fm)
    rate = 2.0 * adjugate_cross(fm.m, pack.Ein)
    if variant == "normalized":
        rate = rate - 2.0 * K * K * fm.m
    return 0.5 * (rate + rate.T), pack


def frame_summary(fm, t):
    """Monitor densities of a homogeneous metric on a cell of frame volume sqrt(det m)."""
    from .monitors import FrameCalc, summarize
    pack = frame_curvature(fm)
    weight = np.array([math.sqrt(np.linalg.det(fm.m))])
    return summarize(pack, FrameCalc(), t, weight)


@dataclass
class OdeRun:
    times: list
    states: list
    monitors: list = field(default_factory=list)
    status: str = "completed"
    dt: float = None


def _check(variant, K):
    if variant not in ("raw", "normalized"):
        raise ValueError(f"frame backend supports raw and normalized flows, got {variant!r}")
    if variant == "normalized" and (K is None or not K < 0):
        raise ValueError("normalized flow needs K < 0")


def ode_step(fm, dt, variant="raw", K=None):
    """One classical RK4 step of dm/dt = 2 adj Ein(m) (- 2 K^2 m); raises EinDegenerate first."""
    k1, pack = frame_rhs(fm, variant, K)
    if pack.lam[0] < EIN_FLOOR:
        raise EinDegenerate(None, float(pack.lam[0]))
    m0 = fm.m
    k2, _ = frame_rhs(fm.with_metric(m0 + 0.5 * dt * k1), variant, K)
    k3, _ = frame_rhs(fm.with_metric(m0 + 0.5 * dt * k2), variant, K)
    k4, _ = frame_rhs(fm.with_metric(m0 + dt * k3), variant, K)
    m1 = m0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return fm.with_metric(0.5 * (m1 + m1.T))


def xcf_ode_run(fm0, t_end, dt, variant="raw", K=None, monitor=True):
    """Fixed-step RK4 run; stops with status 'ein-degenerate(t)' if Ein loses positivity."""
    from .flow import step_count
    from .monitors import MonitorPipeline

    _check(variant, K)
    if not dt > 0:
        raise ValueError("dt must be positive")
    fm0.check_jacobi()
    nsteps = step_count(t_end, dt)
    pipe = MonitorPipeline(dt, summarizer=lambda s: frame_summary(s[1], s[0])) if monitor else None
    out = OdeRun(times=[], states=[], dt=dt)

    def record(t, fm):
        out.times.append(t)
        out.states.append(fm)
        if pipe is not None:
            out.monitors.extend(pipe.push((t, fm)))

    fm = fm0
    record(0.0, fm)
    for k in range(nsteps):
        t = (k + 1) * dt
        try:
            fm = ode_step(fm, dt, variant, K)
        except EinDegenerate:
            out.status = f"ein-degenerate({k * dt!r})"
            break
        except NonPositiveMetric:
            out.status = f"ein-degenerate({k * dt!r})"
            break
        record(t, fm)
    if pipe is not None:
        out.monitors.extend(pipe.finish())
    return out
