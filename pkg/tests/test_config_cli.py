import csv
import json
import math

import numpy as np
import pytest

from xcflab.cli import curvature_document, main
from xcflab.config import RunConfig, worker_cap
from xcflab.errors import ConfigError
from xcflab.frame import FrameMetric
from xcflab.grid import MetricGrid


def grid_doc(tmp_path, **flow):
    f = {"variant": "raw", "t_end": 5e-4, "dt": 1e-4}
    f.update(flow)
    return {"backend": "grid", "family": {"hyperbolic_ball": {"K0": -1.0}},
            "grid": {"dims": 9, "h": 0.0625, "balanced": True},
            "flow": f,
            "outputs": {"monitor_csv": str(tmp_path / "out" / "mon.csv"),
                        "snapshot_dir": str(tmp_path / "out" / "snaps")}}


def frame_doc(tmp_path):
    return {"backend": "frame", "family": {"frame_solvable": {"m0": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}},
            "flow": {"variant": {"normalized": {"K": -1}}, "t_end": 1.0, "dt": 0.01},
            "outputs": {"monitor_csv": str(tmp_path / "fr.csv")}}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def field_of(doc):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_dict(doc)
    return info.value.field


# -- validation ----------------------------------------------------------------------

def test_config_errors_name_the_field(tmp_path):
    base = grid_doc(tmp_path)
    assert field_of({**base, "flow": {"t_end": 1.0, "dt": 0.1, "cfl": 0.2}}) == "flow.dt"
    assert field_of({**base, "colour": "red"}) == "colour"
    assert field_of({**base, "flow": {"variant": "ricci", "t_end": 1.0}}) == "flow.variant"
    assert field_of({**base, "flow": {"dt": 0.1}}) == "flow.t_end"
    assert field_of({**base, "flow": {"variant": "normalized", "K": 1.0, "t_end": 1.0}}) == "flow.K"
    assert field_of({**base, "flow": {"K": -1.0, "t_end": 1.0}}) == "flow.K"
    assert field_of({**base, "grid": {"stencil_order": 3}}) == "grid.stencil_order"
    assert field_of({**base, "family": {"torus": {}}}) == "family"
    fr = frame_doc(tmp_path)
    assert field_of({**fr, "flow": {"t_end": 1.0}}) == "flow.dt"
    assert field_of({**fr, "flow": {"variant": "deturck", "t_end": 1.0, "dt": 0.1}}) == "flow.variant"


def test_config_defaults_and_family_forms(tmp_path):
    cfg = RunConfig.from_dict({"family": {"name": "hyperbolic_halfspace", "K0": -2.0}, "flow": {"t_end": 0.1}})
    assert cfg.backend == "grid" and cfg.cfl == 0.2 and cfg.dt is None
    assert cfg.dims == (17, 17, 17)
    grid = cfg.initial_grid()
    center = np.asarray(grid.origin) + 0.5 * (np.asarray(grid.dims) - 1) * np.asarray(grid.spacing)
    np.testing.assert_allclose(center, [0.0, 0.0, 1.5])
    fr = RunConfig.from_dict(frame_doc(tmp_path))
    assert fr.variant == "normalized" and fr.K == -1


def test_unwritable_output_is_rejected(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    doc = grid_doc(tmp_path)
    doc["outputs"] = {"monitor_csv": str(blocker / "mon.csv")}
    assert field_of(doc) == "outputs.monitor_csv"


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("XCFLAB_THREADS", "2")
    assert worker_cap() == 2
    monkeypatch.setenv("XCFLAB_THREADS", "zero")
    with pytest.raises(ConfigError):
        worker_cap()


# -- commands ------------------------------------------------------------------------

def test_run_writes_monitors_and_snapshots(tmp_path, capsys):
    doc = grid_doc(tmp_path, snapshot_cadence=2)
    assert main(["run", "--config", write(tmp_path, doc)]) == 0
    assert "status: completed" in capsys.readouterr().out
    rows = list(csv.DictReader(open(tmp_path / "out" / "mon.csv")))
    assert len(rows) == math.floor(5e-4 / 1e-4 + 1e-9) + 1
    snaps = sorted(p.name for p in (tmp_path / "out" / "snaps").iterdir())
    assert snaps == ["snapshot_000000.json", "snapshot_000002.json", "snapshot_000004.json", "snapshot_000005.json"]
    last = MetricGrid.from_json((tmp_path / "out" / "snaps" / snaps[-1]).read_text())
    first = MetricGrid.from_json((tmp_path / "out" / "snaps" / snaps[0]).read_text())
    sigma = math.sqrt(4 * 5e-4 + 1)
    np.testing.assert_allclose(last.values, sigma * first.values, rtol=1e-10, atol=1e-12)


def test_run_is_byte_deterministic(tmp_path):
    doc = grid_doc(tmp_path)
    cfg = write(tmp_path, doc)
    assert main(["run", "--config", cfg]) == 0
    a = (tmp_path / "out" / "mon.csv").read_bytes()
    b = (tmp_path / "out" / "snaps" / "snapshot_000005.json").read_bytes()
    assert main(["run", "--config", cfg]) == 0
    assert (tmp_path / "out" / "mon.csv").read_bytes() == a
    assert (tmp_path / "out" / "snaps" / "snapshot_000005.json").read_bytes() == b


def test_snapshot_restart(tmp_path):
    doc = grid_doc(tmp_path)
    assert main(["run", "--config", write(tmp_path, doc)]) == 0
    snap = str(tmp_path / "out" / "snaps" / "snapshot_000005.json")
    restart = {"family": {"snapshot": {"path": snap}}, "flow": {"t_end": 1e-4, "dt": 1e-4}}
    cfg = RunConfig.from_dict(restart)
    assert cfg.initial_grid().t == pytest.approx(5e-4)
    assert main(["run", "--config", write(tmp_path, restart, "restart.json")]) == 0


def test_frame_normalized_run(tmp_path):
    assert main(["run", "--config", write(tmp_path, frame_doc(tmp_path))]) == 0
    rows = list(csv.DictReader(open(tmp_path / "fr.csv")))
    assert len(rows) == 101
    assert max(abs(float(r["J"])) for r in rows) <= 1e-10


def test_exit_codes(tmp_path, capsys):
    bad = grid_doc(tmp_path)
    bad["flow"]["cfl"] = 0.1
    assert main(["run", "--config", write(tmp_path, bad)]) == 2
    assert "flow.dt" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    stall = grid_doc(tmp_path, dt=0.05, t_end=0.5)
    assert main(["run", "--config", write(tmp_path, stall)]) == 3
    assert main(["verify", "--suite", "algebraic", "--tol-scale", "0"]) == 2


def test_degenerate_run_is_not_an_error(tmp_path, capsys):
    doc = {"backend": "frame", "family": {"frame_custom": {"c": [0.0] * 27}}, "flow": {"t_end": 1.0, "dt": 0.1}}
    assert main(["run", "--config", write(tmp_path, doc)]) == 0
    assert "ein-degenerate" in capsys.readouterr().out


def test_curvature_command(tmp_path):
    doc = grid_doc(tmp_path)
    doc["grid"]["dims"] = [5, 6, 7]
    out = tmp_path / "curv.json"
    assert main(["curvature", "--config", write(tmp_path, doc), "--out", str(out)]) == 0
    cur = json.loads(out.read_text())
    assert cur["kind"] == "curvature" and cur["dims"] == [5, 6, 7]
    assert len(cur["detE"]) == 5 * 6 * 7 and len(cur["Ein"]) == 6 * 5 * 6 * 7
    fr = curvature_document(RunConfig.from_dict(frame_doc(tmp_path)))
    np.testing.assert_allclose(fr["lam"], [1.0, 1.0, 1.0])
    assert fr["Ein"] == [1.0, 0.0, 0.0, 1.0, 0.0, 1.0]


def test_embed_command(tmp_path, capsys):
    doc = {"family": {"hyperbolic_halfspace": {"K0": -1.0}}, "grid": {"dims": 9, "h": 0.0625},
           "flow": {"t_end": 0.1}, "embedding": {"path_order": [2, 1, 0]}}
    out = tmp_path / "emb.json"
    assert main(["embed", "--config", write(tmp_path, doc), "--out", str(out)]) == 0
    emb = json.loads(out.read_text())
    assert emb["residuals"]["metricResidual"] < 1e-2
    assert "embedded:" in capsys.readouterr().out
    doc["embedding"] = {"path_order": [0, 0, 1]}
    assert main(["embed", "--config", write(tmp_path, doc), "--out", str(out)]) == 2
    fr = frame_doc(tmp_path)
    assert main(["embed", "--config", write(tmp_path, fr), "--out", str(out)]) == 2


def test_symbol_command(tmp_path, capsys):
    rep = tmp_path / "sym.json"
    assert main(["symbol", "--samples", "50", "--seed", "4", "--report", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["xcf_kernel_dim_histogram"] == {"3": 50}
    assert main(["symbol", "--samples", "0"]) == 2


def test_verify_command_small_suite(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    assert main(["verify", "--suite", "algebraic", "--report", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["passed"] and list(doc["suites"]) == ["algebraic"]
    assert "checks passed" in capsys.readouterr().err
    # an absurd tolerance scale makes the upper-bound checks fail
    assert main(["verify", "--suite", "algebraic", "--tol-scale", "1e-30", "--report", str(rep)]) == 1


def test_frame_snapshot_roundtrip_via_config(tmp_path):
    fm = FrameMetric.solvable(np.diag([1.0, 1.0, 4.0]), 2.0)
    path = tmp_path / "fm.json"
    path.write_text(fm.to_json())
    cfg = RunConfig.from_dict({"backend": "frame", "family": {"snapshot": {"path": str(path)}},
                               "flow": {"t_end": 0.1, "dt": 0.01}})
    assert np.array_equal(cfg.initial_frame().m, fm.m)
