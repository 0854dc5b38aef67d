import csv
import json

import numpy as np
import pytest

from diracpoint import Grid
from diracpoint.cli import initial_data_factory, main
from diracpoint.errors import UnknownSpec


@pytest.fixture()
def tiny_config(tmp_path):
    doc = {
        "grid": {"L": 20.0, "n": 256},
        "time": {"dt": 5e-3, "T": 0.1, "record_every": 2,
                 "snapshot_times": [0.05, 0.1]},
        "initial": {"kind": "gaussian", "amplitude": 0.3, "width": 1.5,
                    "spinor": [1.0, 0.5]},
        "diagnostics": {"energy_drift_tol": 1e-3},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_missing_config_exits_2(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 2


def test_invalid_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 2


def test_simulate_outputs(tmp_path, tiny_config):
    out = tmp_path / "out"
    code = main(["simulate", "--config", str(tiny_config),
                 "--out-dir", str(out)])
    assert code == 0
    with open(out / "trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["t", "re_y1", "im_y1", "re_y2", "im_y2",
                             "energy", "l2", "h1", "h1_local"]
    assert len(rows) == 11  # 0.1 / (5e-3 * 2) + endpoints
    snap = out / "snapshots" / "snapshot_t0.05.csv"
    with open(snap) as fh:
        srows = list(csv.DictReader(fh))
    assert list(srows[0]) == ["x", "re_psi1", "im_psi1", "re_psi2", "im_psi2"]
    assert len(srows) == 256
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["ok"] is True
    assert manifest["scenario"] == "simulate"
    assert any(a["name"] == "energy_drift" for a in manifest["assertions"])
    assert (out / "trace.svg").exists()
    assert (out / "final_snapshot.svg").exists()


def test_simulate_boundary_override(tmp_path, tiny_config):
    out = tmp_path / "out-abs"
    code = main(["simulate", "--config", str(tiny_config),
                 "--out-dir", str(out), "--boundary", "absorbing"])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["assertions"][0]["name"] == "completed"


def test_solitary_scan_outputs(tmp_path):
    out = tmp_path / "scan"
    code = main(["solitary-scan", "--m", "1", "--potential", "-0.5,0.25",
                 "--omega-grid", "8", "--out-dir", str(out)])
    assert code == 0
    with open(out / "branches.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["j", "omega", "root_index", "C", "residual",
                             "h1_norm"]
    assert all(float(r["residual"]) < 1e-10 for r in rows)
    summary = json.loads((out / "branch_summary.json").read_text())
    assert summary["component_1"]["nonzero_roots"] >= 1
    assert (out / "branches.svg").exists()


def test_convergence_study_small(tmp_path):
    cfg = tmp_path / "conv.json"
    cfg.write_text(json.dumps({
        "grid": {"L": 20.0, "n": 512},
        "time": {"T": 0.25},
        "initial": {"kind": "gaussian", "amplitude": 0.5, "width": 1.5,
                    "spinor": [1.0, 0.5]},
    }))
    out = tmp_path / "conv"
    code = main(["convergence-study", "--config", str(cfg),
                 "--dts", "1e-2,5e-3,2.5e-3", "--out-dir", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["assertions"][0]["name"] == "strang_order"
    assert manifest["assertions"][0]["passed"]


def test_duhamel_check_small(tmp_path):
    cfg = tmp_path / "duh.json"
    cfg.write_text(json.dumps({
        "levels": [{"L": 20.0, "n": 512, "dt": 4e-3},
                   {"L": 20.0, "n": 1024, "dt": 2e-3}],
        "time": {"T": 0.4},
    }))
    out = tmp_path / "duh-out"
    code = main(["duhamel-check", "--config", str(cfg), "--out-dir", str(out)])
    manifest = json.loads((out / "manifest.json").read_text())
    names = {a["name"]: a["passed"] for a in manifest["assertions"]}
    assert names["reconstruction_error"]
    assert names["cone_kernel_origin"]
    assert (out / "errors.csv").exists()
    assert code in (0, 1)  # refinement gain is resolution-dependent


class TestInitialDataFactory:
    def test_solitary_matches_module(self, cubic_quintic):
        from diracpoint.solitary import solitary_field, solitary_params
        grid = Grid(L=40.0, n=512)
        spec = {"kind": "solitary", "omega1": 0.9, "omega2": -0.8}
        f = initial_data_factory(spec, grid, cubic_quintic)
        sp = solitary_params(cubic_quintic, 0.9, -0.8)
        want = solitary_field(sp, grid, 0.0)
        assert np.max(np.abs(f.values - want.values)) == 0.0

    def test_zero_amplitude_gaussian(self, cubic_quintic):
        grid = Grid(L=20.0, n=256)
        f = initial_data_factory({"kind": "gaussian", "amplitude": 0.0},
                                 grid, cubic_quintic)
        assert np.all(f.values == 0)

    def test_noise_deterministic(self, cubic_quintic):
        grid = Grid(L=20.0, n=256)
        spec = {"kind": "noise", "seed": 123, "envelope_width": 2.0}
        a = initial_data_factory(spec, grid, cubic_quintic)
        b = initial_data_factory(spec, grid, cubic_quintic)
        assert np.array_equal(a.values, b.values)

    def test_unknown_kind(self, cubic_quintic):
        grid = Grid(L=20.0, n=256)
        with pytest.raises(UnknownSpec):
            initial_data_factory({"kind": "vortex"}, grid, cubic_quintic)


def test_simulate_drift_abort_exits_1(tmp_path):
    cfg = tmp_path / "strict.json"
    cfg.write_text(json.dumps({
        "grid": {"L": 20.0, "n": 256},
        "time": {"dt": 5e-3, "T": 0.5},
        "initial": {"kind": "gaussian", "amplitude": 0.8, "width": 1.0},
        "diagnostics": {"energy_drift_tol": 1e-16},
    }))
    out = tmp_path / "strict-out"
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(out)]) == 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["ok"] is False


def test_threads_env_fallback(monkeypatch):
    from diracpoint.cli import build_parser
    monkeypatch.setenv("DIRAC_ATTR_THREADS", "7")
    args = build_parser().parse_args(["solitary-scan"])
    assert args.threads == 7


def test_manifest_stable_under_rerun(tmp_path, tiny_config):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["simulate", "--config", str(tiny_config),
                     "--out-dir", str(out)]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        doc.pop("wall_time_s")
        doc.pop("outputs")  # paths differ by out-dir
        outs.append(doc)
    assert outs[0] == outs[1]
