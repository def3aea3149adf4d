"""Closed-form metric families used as initial data and Dirichlet boundary data.

A family evaluates ``g(x, t)`` on arrays of chart points ``x[..., 3]``.  The
static part is analytic in ``x`` and written with complex-safe operations (no
``abs``, no conjugation) so that :meth:`Family.jet` can be pushed through a
complex-step derivative.  Time dependence, where known, is a pure scale factor:
hyperbolic data under the cross curvature flow stays hyperbolic.
"""

import math

import numpy as np

EYE = np.eye(3)


def scale_factor(K0, t, variant="raw", K=None):
    """Scale sigma(t) with g(t) = sigma(t) g(0) for constant curvature K0 data.

    raw and deturck: sigma^2 = 4 K0^2 t + 1.  normalized(K):
    (sigma^2)' = 4 K0^2 - 4 K^2 sigma^2.
    """
    if variant in ("raw", "deturck"):
        return math.sqrt(4.0 * K0 * K0 * t + 1.0)
    if variant == "normalized":
        r = (K0 * K0) / (K * K)
        return math.sqrt(r + (1.0 - r) * math.exp(-4.0 * K * K * t))
    raise ValueError(f"unknown flow variant {variant!r}")


def scale_rate(K0, t, variant="raw", K=None):
    s = scale_factor(K0, t, variant, K)
    rate = 2.0 * K0 * K0 / s
    if variant == "normalized":
        rate -= 2.0 * K * K * s
    return rate


# -- scalar jets: (f, grad f, hess f) with product rule -------------------------

def _jet_mul(a, b):
    f, df, ddf = a
    g, dg, ddg = b
    return (f * g,
            f[..., None] * dg + g[..., None] * df,
            f[..., None, None] * ddg + g[..., None, None] * ddf
            + df[..., :, None] * dg[..., None, :] + dg[..., :, None] * df[..., None, :])


def _bump_jet(x, center, width, eps):
    """1 + eps exp(-|x - c|^2 / w^2)."""
    y = x - np.asarray(center, dtype=float)
    w2 = width * width
    b = np.exp(-np.sum(y * y, axis=-1) / w2)
    db = (-2.0 / w2) * y * b[..., None]
    ddb = ((4.0 / (w2 * w2)) * y[..., :, None] * y[..., None, :] - (2.0 / w2) * EYE) * b[..., None, None]
    return 1.0 + eps * b, eps * db, eps * ddb


def _compact_bump_jet(x, center, radius, eps, sharpness=4.0):
    """1 + eps exp(-c s / (1 - s)), s = |x - c|^2 / R^2, extended by 1 outside s < 1 (C-infinity)."""
    y = x - np.asarray(center, dtype=float)
    r2 = radius * radius
    s = np.sum(y * y, axis=-1) / r2
    inside = np.real(s) < 1.0
    q = np.where(inside, 1.0 - s, 1.0)
    c = sharpness
    f = np.where(inside, np.exp(-c * s / q), 0.0)
    f1 = -c * f / q ** 2
    f2 = f * (c * c / q ** 4 - 2.0 * c / q ** 3)
    ds = (2.0 / r2) * y
    db = f1[..., None] * ds
    ddb = f2[..., None, None] * ds[..., :, None] * ds[..., None, :] + (2.0 / r2) * f1[..., None, None] * EYE
    return 1.0 + eps * f, eps * db, eps * ddb


class Family:
    name = "family"
    K0 = None          # curvature of the hyperbolic background, None if no closed-form evolution
    has_jet = False

    def static_metric(self, x):
        raise NotImplementedError

    def static_jet(self, x):
        raise NotImplementedError(f"family {self.name} has no analytic jet")

    @property
    def evolves(self):
        return self.K0 is not None

    def metric(self, x, t=0.0, variant="raw", K=None):
        g = self.static_metric(x)
        if t == 0.0:
            return g
        self._require_evolution()
        return scale_factor(self.K0, t, variant, K) * g

    def dt_metric(self, x, t=0.0, variant="raw", K=None):
        self._require_evolution()
        return scale_rate(self.K0, t, variant, K) * self.static_metric(x)

    def jet(self, x, t=0.0, variant="raw", K=None):
        g, dg, ddg = self.static_jet(x)
        if t == 0.0:
            return g, dg, ddg
        self._require_evolution()
        s = scale_factor(self.K0, t, variant, K)
        return s * g, s * dg, s * ddg

    @property
    def background(self):
        """Constant-curvature family this one agrees with away from any perturbation, if any."""
        return None

    def _require_evolution(self):
        if self.K0 is None:
            raise ValueError(f"family {self.name} has no closed-form time evolution")

    def to_dict(self):
        raise NotImplementedError


class ConformalFamily(Family):
    """g = phi(x) * identity."""

    has_jet = True

    def factor_jet(self, x):
        raise NotImplementedError

    def static_metric(self, x):
        return self.factor_jet(x)[0][..., None, None] * EYE

    def static_jet(self, x):
        f, df, ddf = self.factor_jet(x)
        g = f[..., None, None] * EYE
        dg = df[..., :, None, None] * EYE
        ddg = ddf[..., :, :, None, None] * EYE
        return g, dg, ddg


class Flat(ConformalFamily):
    name = "flat"

    def __init__(self):
        self.K0 = 0.0

    def factor_jet(self, x):
        shape = np.shape(x)[:-1]
        dtype = np.result_type(x, float)
        return np.ones(shape, dtype), np.zeros(shape + (3,), dtype), np.zeros(shape + (3, 3), dtype)

    def to_dict(self):
        return {"name": self.name}


class HyperbolicHalfspace(ConformalFamily):
    """Upper half-space chart, g = delta / (|K0| z^2); sectional curvature K0."""

    name = "hyperbolic_halfspace"

    def __init__(self, K0=-1.0):
        if K0 >= 0:
            raise ValueError("K0 must be negative")
        self.K0 = float(K0)

    def factor_jet(self, x):
        c = -self.K0
        z = x[..., 2]
        f = 1.0 / (c * z * z)
        df = np.zeros(np.shape(x), dtype=np.result_type(x, float))
        ddf = np.zeros(np.shape(x) + (3,), dtype=df.dtype)
        df[..., 2] = -2.0 / (c * z ** 3)
        ddf[..., 2, 2] = 6.0 / (c * z ** 4)
        return f, df, ddf

    @property
    def background(self):
        return self

    def to_dict(self):
        return {"name": self.name, "K0": self.K0}


class HyperbolicBall(ConformalFamily):
    """Poincare ball chart, g = 4 delta / (|K0| (1 - r^2)^2)."""

    name = "hyperbolic_ball"

    def __init__(self, K0=-1.0):
        if K0 >= 0:
            raise ValueError("K0 must be negative")
        self.K0 = float(K0)

    def factor_jet(self, x):
        c = 4.0 / (-self.K0)
        q = 1.0 - np.sum(x * x, axis=-1)
        f = c / (q * q)
        df = (4.0 * c) * x / (q ** 3)[..., None]
        ddf = (24.0 * c) * x[..., :, None] * x[..., None, :] / (q ** 4)[..., None, None] \
            + (4.0 * c) * EYE / (q ** 3)[..., None, None]
        return f, df, ddf

    @property
    def background(self):
        return self

    def to_dict(self):
        return {"name": self.name, "K0": self.K0}


class PerturbedHyperbolic(Family):
    """Hyperbolic chart metric phi(x) times I + eps * b(x) * A.

    b is a unit-height bump around ``bump_center``: the default ``compact``
    profile exp(-4 s/(1 - s)), s = |x-c|^2/w^2, is smooth with support of radius w,
    so outside it the metric is exactly hyperbolic and the scaled boundary data
    is the true flow there.  ``gaussian`` is exp(-|x-c|^2/w^2).  The default
    shape tensor A is a pure shear, because a purely
    conformal bump centered on the ball origin is rotationally symmetric and
    therefore integrable (its Devil tensor vanishes identically).
    """

    name = "perturbed_hyperbolic"
    has_jet = True
    DEFAULT_SHAPE = ((0.0, 0.5, 0.0), (0.5, 0.0, 0.0), (0.0, 0.0, 0.0))

    def __init__(self, K0=-1.0, eps=0.05, bump_center=(0.0, 0.0, 0.0), bump_width=0.3, chart="ball",
                 profile="compact", shape=DEFAULT_SHAPE):
        # outside the bump the metric is exactly the hyperbolic one
        base = {"ball": HyperbolicBall, "halfspace": HyperbolicHalfspace}[chart]
        if profile not in ("gaussian", "compact"):
            raise ValueError(f"bump profile must be 'gaussian' or 'compact', got {profile!r}")
        self.base = base(K0)
        self.K0 = float(K0)
        self.eps = float(eps)
        self.bump_center = tuple(float(c) for c in bump_center)
        self.bump_width = float(bump_width)
        self.chart = chart
        self.profile = profile
        self.shape = np.array(shape, dtype=float)
        if not np.allclose(self.shape, self.shape.T):
            raise ValueError("bump shape tensor must be symmetric")

    @property
    def background(self):
        return self.base

    def static_jet(self, x):
        f, df, ddf = self.base.factor_jet(x)
        bump = _bump_jet if self.profile == "gaussian" else _compact_bump_jet
        b, db, ddb = bump(x, self.bump_center, self.bump_width, self.eps)
        A = self.shape
        M = EYE + (b - 1.0)[..., None, None] * A
        dM = db[..., :, None, None] * A
        ddM = ddb[..., :, :, None, None] * A
        g = f[..., None, None] * M
        dg = df[..., :, None, None] * M[..., None, :, :] + f[..., None, None, None] * dM
        ddg = (ddf[..., :, :, None, None] * M[..., None, None, :, :]
               + df[..., :, None, None, None] * dM[..., None, :, :, :]
               + df[..., None, :, None, None] * dM[..., :, None, :, :]
               + f[..., None, None, None, None] * ddM)
        return g, dg, ddg

    def static_metric(self, x):
        return self.static_jet(x)[0]

    def to_dict(self):
        return {"name": self.name, "K0": self.K0, "eps": self.eps, "bump_center": list(self.bump_center),
                "bump_width": self.bump_width, "chart": self.chart, "profile": self.profile,
                "shape": self.shape.tolist()}


class PeriodicSynthetic(Family):
    """Smooth L-periodic perturbation of the flat metric (stencil test harness, not geometric)."""

    name = "periodic_synthetic"
    has_jet = True

    def __init__(self, amplitude=0.1, period=1.0):
        self.amplitude = float(amplitude)
        self.period = float(period)
        self.K0 = None

    def static_jet(self, x):
        k = 2.0 * math.pi / self.period
        a = self.amplitude
        shape = np.shape(x)[:-1]
        dtype = np.result_type(x, float)
        g = np.zeros(shape + (3, 3), dtype)
        dg = np.zeros(shape + (3, 3, 3), dtype)
        ddg = np.zeros(shape + (3, 3, 3, 3), dtype)
        # each component is a * trig(k * (w . x)); list (i, j, w, fn)
        terms = [
            (0, 0, (1.0, 1.0, 0.0), "sin"),
            (1, 1, (0.0, 1.0, 2.0), "cos"),
            (2, 2, (1.0, 0.0, 1.0), "sin"),
            (0, 1, (0.0, 0.0, 1.0), "sin"),
            (1, 2, (1.0, 0.0, 0.0), "cos"),
            (0, 2, (1.0, 1.0, 1.0), "sin"),
        ]
        for i in range(3):
            g[..., i, i] = 1.0
        for i, j, w, fn in terms:
            w = np.asarray(w)
            ph = k * (x @ w)
            if fn == "sin":
                v, dv, ddv = np.sin(ph), np.cos(ph), -np.sin(ph)
            else:
                v, dv, ddv = np.cos(ph), -np.sin(ph), -np.cos(ph)
            amp = a if i == j else 0.5 * a
            for (p, q) in {(i, j), (j, i)}:
                g[..., p, q] += amp * v
                dg[..., :, p, q] += amp * k * dv[..., None] * w
                ddg[..., :, :, p, q] += amp * k * k * ddv[..., None, None] * np.outer(w, w)
        return g, dg, ddg

    def static_metric(self, x):
        return self.static_jet(x)[0]

    def to_dict(self):
        return {"name": self.name, "amplitude": self.amplitude, "period": self.period}


class SolvableChart(Family):
    """Chart realization (x, y, s) of the left-invariant metric m on the Lie algebra
    [e3, e1] = e1, [e3, e2] = a e2, using frame e1 = e^s d_x, e2 = e^{a s} d_y, e3 = d_s.

    a = 1 is the hyperbolic algebra: every left-invariant metric on it has
    constant negative curvature.
    """

    name = "solvable_chart"
    has_jet = True

    def __init__(self, m=((1, 0, 0), (0, 1, 0), (0, 0, 1)), a=1.0):
        self.m = np.array(m, dtype=float)
        self.a = float(a)
        self.K0 = None
        if self.a == 1.0:
            from .frame import FrameMetric, frame_curvature
            pack = frame_curvature(FrameMetric.solvable(self.m, self.a))
            self.K0 = float(-pack.lam[0])

    def frame_vectors(self, x):
        """Chart components of e1, e2, e3 at x: column j is e_j."""
        s = x[..., 2]
        out = np.zeros(np.shape(x) + (3,), dtype=np.result_type(x, float))
        out[..., 0, 0] = np.exp(s)
        out[..., 1, 1] = np.exp(self.a * s)
        out[..., 2, 2] = 1.0
        return out

    def static_jet(self, x):
        s = x[..., 2]
        p = np.array([1.0, self.a, 0.0])
        theta = np.exp(-s[..., None] * p)
        tt = theta[..., :, None] * theta[..., None, :]
        pp = p[:, None] + p[None, :]
        g = self.m * tt
        shape = np.shape(x)[:-1]
        dg = np.zeros(shape + (3, 3, 3), dtype=g.dtype)
        ddg = np.zeros(shape + (3, 3, 3, 3), dtype=g.dtype)
        dg[..., 2, :, :] = -pp * g
        ddg[..., 2, 2, :, :] = pp * pp * g
        return g, dg, ddg

    def static_metric(self, x):
        return self.static_jet(x)[0]

    def to_dict(self):
        return {"name": self.name, "m": self.m.tolist(), "a": self.a}


class PulledBack(Family):
    """phi^* g for phi(x) = x + amp * exp(-|x - c|^2 / w^2) * v; phi is the identity
    up to a negligible gaussian tail on the box boundary."""

    name = "pulled_back"

    def __init__(self, base, amplitude=0.05, direction=(1.0, 0.0, 0.0), center=(0.0, 0.0, 0.0), width=0.15):
        self.base = base
        self.amplitude = float(amplitude)
        self.direction = np.asarray(direction, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.width = float(width)
        self.K0 = base.K0

    def diffeo(self, x):
        y = x - self.center
        w2 = self.width ** 2
        b = np.exp(-np.sum(y * y, axis=-1) / w2)
        phi = x + self.amplitude * b[..., None] * self.direction
        grad_b = (-2.0 / w2) * y * b[..., None]
        dphi = EYE + self.amplitude * self.direction[:, None] * grad_b[..., None, :]
        return phi, dphi

    def static_metric(self, x):
        phi, dphi = self.diffeo(x)
        g = self.base.static_metric(phi)
        return np.einsum("...ai,...ab,...bj->...ij", dphi, g, dphi)

    def to_dict(self):
        return {"name": self.name, "base": self.base.to_dict(), "amplitude": self.amplitude,
                "direction": self.direction.tolist(), "center": self.center.tolist(), "width": self.width}


_REGISTRY = {cls.name: cls for cls in (Flat, HyperbolicHalfspace, HyperbolicBall, PerturbedHyperbolic,
                                       PeriodicSynthetic, SolvableChart)}


def family_from_dict(d):
    d = dict(d)
    name = d.pop("name")
    if name == PulledBack.name:
        base = family_from_dict(d.pop("base"))
        return PulledBack(base, **d)
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown metric family {name!r}") from None
    return cls(**d)
