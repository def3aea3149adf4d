"""Sampled metrics on a 3D coordinate box."""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonPositiveMetric
from .families import Family, family_from_dict
from .tensors import is_spd, sym_to_vec, vec_to_sym

DIRICHLET = "dirichlet-analytic"
PERIODIC = "periodic"


@dataclass(frozen=True)
class MetricGrid:
    """Node values ``values[i1, i2, i3, :, :]`` of a Riemannian metric.

    In Dirichlet-analytic mode the outermost node layer is boundary data and
    any ghost layer a stencil needs is evaluated from ``family`` at time ``t``
    (with ``variant``/``K`` selecting the boundary evolution law).  Periodic
    mode wraps around and is only a stencil test harness.
    """

    dims: tuple
    spacing: tuple
    origin: tuple
    values: np.ndarray
    boundary: str = DIRICHLET
    family: Family = None
    t: float = 0.0
    variant: str = "raw"
    K: float = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if tuple(self.values.shape) != tuple(self.dims) + (3, 3):
            raise ValueError(f"values shape {self.values.shape} does not match dims {self.dims}")
        if self.boundary == DIRICHLET and self.family is None:
            raise ValueError("dirichlet-analytic grids need a family for boundary data")

    @classmethod
    def from_family(cls, family, dims, spacing, origin, boundary=DIRICHLET, t=0.0, variant="raw", K=None):
        dims = tuple(int(n) for n in dims)
        spacing = tuple(float(h) for h in spacing)
        origin = tuple(float(o) for o in origin)
        x = node_coordinates(dims, spacing, origin)
        g = family.metric(x, t, variant, K)
        grid = cls(dims, spacing, origin, np.ascontiguousarray(g), boundary, family, float(t), variant, K)
        grid.check_spd()
        return grid

    @classmethod
    def centered(cls, family, n, h, center=(0.0, 0.0, 0.0), **kw):
        """n nodes per axis with spacing h, centered at ``center``."""
        half = 0.5 * (n - 1) * h
        origin = tuple(c - half for c in center)
        return cls.from_family(family, (n, n, n), (h, h, h), origin, **kw)

    @property
    def h(self):
        return np.asarray(self.spacing)

    def coordinates(self, pad=0):
        return node_coordinates(self.dims, self.spacing, self.origin, pad)

    def with_values(self, values, t=None):
        return replace(self, values=values, t=self.t if t is None else float(t))

    def check_spd(self):
        ok = is_spd(self.values)
        if not np.all(ok):
            bad = np.argwhere(~ok)[0]
            raise NonPositiveMetric(f"metric not positive definite at node {tuple(bad)}")

    def padded(self, p):
        """Node values extended by p ghost layers on every side."""
        if p == 0:
            return self.values
        if self.boundary == PERIODIC:
            return np.pad(self.values, [(p, p)] * 3 + [(0, 0), (0, 0)], mode="wrap")
        x = self.coordinates(pad=p)
        out = self.family.metric(x, self.t, self.variant, self.K)
        out[p:-p, p:-p, p:-p] = self.values
        return out

    def interior_mask(self):
        """Nodes that evolve freely: everything in periodic mode, all but the outer layer otherwise."""
        mask = np.ones(self.dims, dtype=bool)
        if self.boundary == DIRICHLET:
            mask[0, :, :] = mask[-1, :, :] = False
            mask[:, 0, :] = mask[:, -1, :] = False
            mask[:, :, 0] = mask[:, :, -1] = False
        return mask

    def to_json(self):
        flat = sym_to_vec(self.values).transpose(2, 1, 0, 3).reshape(-1)
        doc = {
            "kind": "grid",
            "dims": list(self.dims),
            "h": list(self.spacing),
            "origin": list(self.origin),
            "boundary": self.boundary,
            "family": self.family.to_dict() if self.family is not None else None,
            "t": self.t,
            "g": flat.tolist(),
        }
        return dumps(doc)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("kind") != "grid":
            raise ValueError("not a grid snapshot")
        dims = tuple(doc["dims"])
        vec = np.asarray(doc["g"], dtype=float).reshape(dims[2], dims[1], dims[0], 6).transpose(2, 1, 0, 3)
        boundary = doc.get("boundary", DIRICHLET)
        family = family_from_dict(doc["family"]) if doc.get("family") else None
        return cls(dims, tuple(doc["h"]), tuple(doc["origin"]), np.ascontiguousarray(vec_to_sym(vec)),
                   boundary, family, float(doc.get("t", 0.0)))


def node_coordinates(dims, spacing, origin, pad=0):
    axes = [origin[a] + spacing[a] * np.arange(-pad, dims[a] + pad) for a in range(3)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


class _Float17(float):
    def __repr__(self):
        return format(self, ".17g")


def _prepare(obj):
    if isinstance(obj, dict):
        return {k: _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _Float17(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(doc):
    """JSON with every real written to 17 significant digits."""
    return _encode(_prepare(doc))


def _encode(obj):
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(k) + ":" + _encode(v) for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, _Float17):
        if not np.isfinite(obj):
            return "null"
        return repr(obj)
    return json.dumps(obj)
