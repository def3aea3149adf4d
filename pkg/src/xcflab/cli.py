"""Command line front door: ``xcflab run | verify | symbol | embed | curvature``.

Exit codes: 0 success (a run that stops with ein-degenerate is still a
success, the status line records it), 1 verification failure, 2 config
error, 3 runtime degeneration (cfl-stall or any other numerical failure).
"""

import argparse
import os
import sys

import numpy as np

from .config import RunConfig, worker_cap
from .curvature import curvature_pack
from .errors import ConfigError, XcfError
from .flow import DEFAULT_CFL, FlowState, run
from .frame import frame_curvature, xcf_ode_run
from .grid import dumps
from .minkowski import integrate_embedding
from .monitors import rows_to_csv
from .symbol import sampling_report
from .tensors import sym_to_vec
from .verify import SUITES, verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _write(path, text):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


class _Snapshots:
    """Writes snapshot_<step>.json every ``cadence`` steps and always the final state."""

    def __init__(self, directory, cadence):
        self.directory = directory
        self.cadence = cadence
        self.last = None
        self.written = set()

    def offer(self, step, text_fn):
        self.last = (step, text_fn)
        if self.directory and self.cadence and step % self.cadence == 0:
            self._dump(step, text_fn)

    def close(self):
        if self.directory and self.last is not None and self.last[0] not in self.written:
            self._dump(*self.last)

    def _dump(self, step, text_fn):
        _write(os.path.join(self.directory, f"snapshot_{step:06d}.json"), text_fn())
        self.written.add(step)


def execute(cfg):
    """Run a validated config; returns (status, rows, dt)."""
    snaps = _Snapshots(cfg.snapshot_dir, cfg.snapshot_cadence)
    monitor = cfg.monitor_csv is not None
    if cfg.backend == "frame":
        out = xcf_ode_run(cfg.initial_frame(), cfg.t_end, cfg.dt, cfg.variant, cfg.K, monitor=monitor)
        for k, fm in enumerate(out.states):
            snaps.offer(k, fm.to_json)
    else:
        grid = cfg.initial_grid()
        try:
            state = FlowState.initial(grid, balanced=cfg.balanced, stencil_order=cfg.stencil_order)
        except ValueError as exc:
            raise ConfigError("grid.balanced", str(exc)) from None
        out = run(state, cfg.t_end, cfg.dt, cfg.variant, cfg.K, cfg.stencil_order,
                  cfl=cfg.cfl if cfg.cfl is not None else DEFAULT_CFL, monitor=monitor,
                  on_state=lambda s: snaps.offer(s.step, s.metric.to_json))
    snaps.close()
    rows = out.monitors if cfg.backend == "frame" else out.rows
    if monitor:
        _write(cfg.monitor_csv, rows_to_csv(rows))
    return out.status, rows, out.dt


def cmd_run(args):
    cfg = RunConfig.load(args.config)
    worker_cap()
    status, rows, dt = execute(cfg)
    print(f"status: {status} (dt={dt!r}, monitor rows={len(rows)})")
    return EXIT_RUNTIME if status == "cfl-stall" else EXIT_OK


def cmd_verify(args):
    report = verify(args.suite, args.tol_scale, args.seed)
    text = dumps(report)
    if args.report:
        _write(args.report, text + "\n")
    else:
        print(text)
    checks = [c for s in report["suites"].values() for c in s["checks"]]
    failed = [c["name"] for c in checks if not c["pass"]]
    print(f"verify {args.suite}: {len(checks) - len(failed)}/{len(checks)} checks passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""), file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_symbol(args):
    if args.samples < 1:
        raise ConfigError("samples", "must be at least 1")
    rep = sampling_report(args.samples, args.seed)
    text = dumps(rep)
    if args.report:
        _write(args.report, text + "\n")
    else:
        print(text)
    print(f"symbol: kernel dims {rep['xcf_kernel_dim_histogram']}, "
          f"deturck min real part {rep['deturck_min_real_part']!r}, failures {len(rep['failures'])}",
          file=sys.stderr)
    return EXIT_OK if not rep["failures"] else EXIT_VERIFY


def cmd_embed(args):
    cfg = RunConfig.load(args.config)
    if cfg.backend != "grid":
        raise ConfigError("backend", "embedding needs the grid backend")
    opts = cfg.extra.get("embedding", {}) or {}
    if not isinstance(opts, dict) or any(k != "path_order" for k in opts):
        raise ConfigError("embedding", "only 'path_order' is accepted")
    order = opts.get("path_order", [0, 1, 2])
    if not isinstance(order, list) or sorted(order) != [0, 1, 2]:
        raise ConfigError("embedding.path_order", "must be a permutation of [0, 1, 2]")
    state = integrate_embedding(cfg.initial_grid(), path_order=order, stencil_order=cfg.stencil_order)
    _write(args.out, state.to_json() + "\n")
    r = state.residuals()
    print("embedded: " + ", ".join(f"{k}={v!r}" for k, v in r.items()))
    return EXIT_OK


def _node_order(a, k):
    return np.asarray(a).transpose((2, 1, 0) + tuple(range(3, 3 + k))).reshape(-1).tolist()


def curvature_document(cfg):
    """Curvature JSON for a grid (node order i1 fastest) or a single frame point."""
    if cfg.backend == "frame":
        p = frame_curvature(cfg.initial_frame())
        return {"kind": "curvature", "backend": "frame", "lam": p.lam.tolist(), "detE": float(p.detE),
                "Ein": sym_to_vec(p.Ein).tolist(), "adjEin": sym_to_vec(p.adjEin).tolist(),
                "Sc": float(p.Sc), "traceCross": float(p.traceCross)}
    grid = cfg.initial_grid()
    p = curvature_pack(grid, cfg.stencil_order)
    return {"kind": "curvature", "backend": "grid", "dims": list(grid.dims), "h": list(grid.spacing),
            "origin": list(grid.origin), "stencil_order": cfg.stencil_order,
            "lam": _node_order(p.lam, 1), "detE": _node_order(p.detE, 0),
            "Ein": _node_order(sym_to_vec(p.Ein), 1), "adjEin": _node_order(sym_to_vec(p.adjEin), 1),
            "Sc": _node_order(p.Sc, 0), "traceCross": _node_order(p.traceCross, 0)}


def cmd_curvature(args):
    cfg = RunConfig.load(args.config)
    doc = curvature_document(cfg)
    _write(args.out, dumps(doc) + "\n")
    lam = np.reshape(doc["lam"], (-1, 3))
    print(f"curvature: {len(lam)} node(s), min Einstein eigenvalue {float(lam.min())!r}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="xcflab", description="Cross curvature flow laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evolve a configured metric and write monitors/snapshots")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--tol-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("symbol", help="sample principal symbols")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.set_defaults(fn=cmd_symbol)

    p = sub.add_parser("embed", help="integrate the Gauss-Weingarten system of a configured grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("curvature", help="curvature fields of a configured metric")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_curvature)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "tol_scale", 1.0) <= 0:
        print("error: --tol-scale must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except XcfError as exc:
        print(f"status: failed ({type(exc).__name__}: {exc})", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
