"""Run configuration: one JSON document per run, validated up front.

Example::

    {
      "backend": "grid",
      "family": {"hyperbolic_halfspace": {"K0": -1.0}},
      "grid": {"dims": 17, "h": 0.03125, "center": [0, 0, 1.5], "stencil_order": 2},
      "flow": {"variant": "raw", "t_end": 0.1, "cfl": 0.2, "snapshot_cadence": 10},
      "outputs": {"monitor_csv": "out/monitors.csv", "snapshot_dir": "out/snapshots"},
      "seed": 0
    }

The family may also be written as {"name": "hyperbolic_halfspace", "K0": -1.0}.
The normalized flow is {"variant": "normalized", "K": -1} or {"variant": {"normalized": {"K": -1}}}.
Every problem is reported as a ConfigError naming the offending field.
"""

import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, XcfError
from .families import HyperbolicBall, HyperbolicHalfspace, PerturbedHyperbolic
from .frame import FrameMetric
from .grid import MetricGrid
from .tensors import vec_to_sym

GRID_FAMILIES = ("hyperbolic_halfspace", "hyperbolic_ball", "perturbed_hyperbolic", "snapshot")
FRAME_FAMILIES = ("frame_solvable", "frame_custom", "snapshot")
TOP_KEYS = ("backend", "family", "grid", "flow", "outputs", "seed")
DEFAULT_CFL = 0.2


@dataclass
class RunConfig:
    backend: str
    family: str
    params: dict
    dims: tuple = (17, 17, 17)
    h: tuple = (1 / 32, 1 / 32, 1 / 32)
    origin: tuple = None
    center: tuple = None
    stencil_order: int = 2
    balanced: bool = False
    variant: str = "raw"
    K: float = None
    t_end: float = 0.1
    dt: float = None
    cfl: float = None
    snapshot_cadence: int = None
    monitor_csv: str = None
    snapshot_dir: str = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    # -- construction ------------------------------------------------------------

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path!r}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
        return cls.from_dict(doc, extra_keys=("embedding",))

    @classmethod
    def from_dict(cls, doc, extra_keys=()):
        if not isinstance(doc, dict):
            raise ConfigError("config", "top level must be a JSON object")
        for key in doc:
            if key not in TOP_KEYS and key not in extra_keys:
                raise ConfigError(key, "unknown field")
        backend = doc.get("backend", "grid")
        if backend not in ("grid", "frame"):
            raise ConfigError("backend", f"must be 'grid' or 'frame', got {backend!r}")
        name, params = _family(doc.get("family"), backend)
        cfg = cls(backend=backend, family=name, params=params,
                  extra={k: doc[k] for k in extra_keys if k in doc})
        cfg._grid(_section(doc, "grid"))
        cfg._flow(_section(doc, "flow"))
        cfg._outputs(_section(doc, "outputs"))
        cfg.seed = _int(doc.get("seed", 0), "seed")
        return cfg

    def _grid(self, sec):
        _only(sec, ("dims", "h", "origin", "center", "stencil_order", "balanced"), "grid")
        if "dims" in sec:
            self.dims = tuple(_int(n, "grid.dims", low=3) for n in _triple(sec["dims"], "grid.dims"))
        if "h" in sec:
            self.h = tuple(_positive(v, "grid.h") for v in _triple(sec["h"], "grid.h"))
        if "origin" in sec and "center" in sec:
            raise ConfigError("grid.origin", "give either origin or center, not both")
        if "origin" in sec:
            self.origin = tuple(_real(v, "grid.origin") for v in _vector(sec["origin"], "grid.origin"))
        if "center" in sec:
            self.center = tuple(_real(v, "grid.center") for v in _vector(sec["center"], "grid.center"))
        self.stencil_order = _int(sec.get("stencil_order", 2), "grid.stencil_order")
        if self.stencil_order not in (2, 4):
            raise ConfigError("grid.stencil_order", "must be 2 or 4")
        self.balanced = sec.get("balanced", False)
        if not isinstance(self.balanced, bool):
            raise ConfigError("grid.balanced", "must be true or false")

    def _flow(self, sec):
        _only(sec, ("variant", "K", "t_end", "dt", "cfl", "snapshot_cadence"), "flow")
        variant = sec.get("variant", "raw")
        K = sec.get("K")
        if isinstance(variant, dict):
            if list(variant) != ["normalized"] or not isinstance(variant["normalized"], dict):
                raise ConfigError("flow.variant", "object form must be {\"normalized\": {\"K\": ...}}")
            K = variant["normalized"].get("K", K)
            variant = "normalized"
        if variant not in ("raw", "deturck", "normalized"):
            raise ConfigError("flow.variant", f"must be raw, deturck or normalized, got {variant!r}")
        if variant == "normalized":
            if K is None:
                raise ConfigError("flow.K", "normalized flow needs K")
            K = _real(K, "flow.K")
            if not K < 0:
                raise ConfigError("flow.K", "must be negative")
        elif K is not None:
            raise ConfigError("flow.K", f"only the normalized flow takes K, variant is {variant!r}")
        if self.backend == "frame" and variant == "deturck":
            raise ConfigError("flow.variant", "the frame backend has no gauge term; use raw or normalized")
        self.variant, self.K = variant, K
        if "t_end" not in sec:
            raise ConfigError("flow.t_end", "required")
        self.t_end = _positive(sec["t_end"], "flow.t_end")
        if "dt" in sec and "cfl" in sec:
            raise ConfigError("flow.dt", "give either dt or cfl, not both")
        if "dt" in sec:
            self.dt = _positive(sec["dt"], "flow.dt")
        elif self.backend == "frame":
            raise ConfigError("flow.dt", "the frame backend needs an explicit dt")
        else:
            self.cfl = _positive(sec.get("cfl", DEFAULT_CFL), "flow.cfl")
        if sec.get("snapshot_cadence") is not None:
            self.snapshot_cadence = _int(sec["snapshot_cadence"], "flow.snapshot_cadence", low=1)

    def _outputs(self, sec):
        _only(sec, ("monitor_csv", "snapshot_dir"), "outputs")
        for key in ("monitor_csv", "snapshot_dir"):
            path = sec.get(key)
            if path is None:
                continue
            if not isinstance(path, str) or not path:
                raise ConfigError(f"outputs.{key}", "must be a non-empty path string")
            target = os.path.dirname(os.path.abspath(path)) if key == "monitor_csv" else os.path.abspath(path)
            if not _writable(target):
                raise ConfigError(f"outputs.{key}", f"{path!r} is not writable")
            setattr(self, key, path)

    # -- initial data --------------------------------------------------------------

    def initial_grid(self):
        """MetricGrid of the initial data (grid backend)."""
        if self.backend != "grid":
            raise ConfigError("backend", "initial_grid needs the grid backend")
        if self.family == "snapshot":
            grid = _load_snapshot(self.params)
            if not isinstance(grid, MetricGrid):
                raise ConfigError("family.snapshot.path", "grid backend needs a grid snapshot")
            return replace(grid, variant="raw" if self.variant == "deturck" else self.variant, K=self.K)
        fam = self._grid_family()
        if self.origin is not None:
            origin = self.origin
        else:
            center = self.center if self.center is not None else _default_center(fam)
            origin = tuple(c - 0.5 * (n - 1) * h for c, n, h in zip(center, self.dims, self.h))
        try:
            return MetricGrid.from_family(fam, self.dims, self.h, origin)
        except XcfError as exc:
            raise ConfigError("grid", f"family is not a metric on this box: {exc}") from None

    def initial_frame(self):
        """FrameMetric of the initial data (frame backend)."""
        if self.backend != "frame":
            raise ConfigError("backend", "initial_frame needs the frame backend")
        p = self.params
        try:
            if self.family == "snapshot":
                fm = _load_snapshot(p)
                if not isinstance(fm, FrameMetric):
                    raise ConfigError("family.snapshot.path", "frame backend needs a frame snapshot")
                return fm
            m0 = _metric(p.get("m0", np.eye(3).tolist()), f"family.{self.family}.m0")
            if self.family == "frame_solvable":
                return FrameMetric.solvable(m0, _real(p.get("a", 1.0), "family.frame_solvable.a"))
            c = np.asarray(p.get("c"), dtype=float) if p.get("c") is not None else None
            if c is None or c.size != 27:
                raise ConfigError("family.frame_custom.c", "needs 27 structure constants c[k][i][j]")
            return FrameMetric(c.reshape(3, 3, 3), m0)
        except (ValueError, XcfError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"family.{self.family}", str(exc)) from None

    def _grid_family(self):
        p = dict(self.params)
        where = f"family.{self.family}"
        try:
            if self.family == "hyperbolic_halfspace":
                _only(p, ("K0",), where)
                return HyperbolicHalfspace(_real(p.get("K0", -1.0), where + ".K0"))
            if self.family == "hyperbolic_ball":
                _only(p, ("K0",), where)
                return HyperbolicBall(_real(p.get("K0", -1.0), where + ".K0"))
            _only(p, ("K0", "eps", "bump_center", "bump_width", "chart", "profile", "shape"), where)
            return PerturbedHyperbolic(**p)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(where, str(exc)) from None


# -- helpers -------------------------------------------------------------------------

def _family(entry, backend):
    allowed = GRID_FAMILIES if backend == "grid" else FRAME_FAMILIES
    if entry is None:
        raise ConfigError("family", "required")
    if not isinstance(entry, dict):
        raise ConfigError("family", "must be an object")
    if "name" in entry:
        params = {k: v for k, v in entry.items() if k != "name"}
        name = entry["name"]
    else:
        if len(entry) != 1:
            raise ConfigError("family", f"exactly one family is required, got {sorted(entry)}")
        (name, params), = entry.items()
        if params is None:
            params = {}
        if not isinstance(params, dict):
            raise ConfigError(f"family.{name}", "parameters must be an object")
    if name not in allowed:
        raise ConfigError("family", f"{name!r} is not a {backend}-backend family; expected one of {list(allowed)}")
    if name == "snapshot" and not isinstance(params.get("path"), str):
        raise ConfigError("family.snapshot.path", "required")
    return name, dict(params)


def _load_snapshot(params):
    path = params["path"]
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("family.snapshot.path", f"cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("family.snapshot.path", f"invalid JSON in {path!r}: {exc.msg}") from None
    kind = doc.get("kind") if isinstance(doc, dict) else None
    try:
        if kind == "grid":
            return MetricGrid.from_json(json.dumps(doc))
        if kind == "frame":
            return FrameMetric.from_json(doc)
    except (ValueError, KeyError, XcfError) as exc:
        raise ConfigError("family.snapshot.path", f"malformed snapshot: {exc}") from None
    raise ConfigError("family.snapshot.path", f"unknown snapshot kind {kind!r}")


def _default_center(fam):
    # the half-space chart needs z > 0; keep the box around height 1.5
    return (0.0, 0.0, 1.5) if isinstance(fam, HyperbolicHalfspace) or getattr(fam, "chart", None) == "halfspace" \
        else (0.0, 0.0, 0.0)


def _section(doc, key):
    sec = doc.get(key, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(key, "must be an object")
    return sec


def _only(sec, keys, where):
    for k in sec:
        if k not in keys:
            raise ConfigError(f"{where}.{k}", "unknown field")


def _real(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(where, f"must be a finite number, got {v!r}")
    return float(v)


def _positive(v, where):
    v = _real(v, where)
    if not v > 0:
        raise ConfigError(where, "must be positive")
    return v


def _int(v, where, low=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(where, f"must be an integer, got {v!r}")
    if low is not None and v < low:
        raise ConfigError(where, f"must be at least {low}")
    return v


def _triple(v, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return (v, v, v)
    return _vector(v, where)


def _vector(v, where):
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ConfigError(where, "must be a list of three numbers")
    return tuple(v)


def _metric(v, where):
    a = np.asarray(v, dtype=float)
    if a.shape == (6,):
        return vec_to_sym(a)
    if a.shape == (3, 3):
        return a
    raise ConfigError(where, "must be a 3x3 matrix or six upper-triangle entries")


def _writable(path):
    # walk up to the first existing ancestor; directories are created on demand
    while path and not os.path.exists(path):
        parent = os.path.dirname(path)
        if parent == path:
            break
        path = parent
    return os.path.isdir(path) and os.access(path, os.W_OK)


def worker_cap():
    """XCFLAB_THREADS as a positive integer (default 1); the kernels run single-threaded either way."""
    raw = os.environ.get("XCFLAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("XCFLAB_THREADS", f"must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("XCFLAB_THREADS", "must be at least 1")
    return n
