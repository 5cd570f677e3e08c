import csv
import json

import pytest

from main import main

SMALL_QUADRATURE = {"mc_samples": 512, "grid_resolution": 6}


def _write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def flow_config(tmp_path):
    return _write_config(tmp_path, {
        "seed": 1,
        "quadrature": SMALL_QUADRATURE,
        "flow": {"potential": "t", "base_points": 4, "volume_check": False, "strain_radius": 1.0},
    })


def test_help():
    assert main(["help"]) == 0
    assert main([]) == 0


def test_unknown_command():
    assert main(["frobnicate"]) == 2


def test_negative_seed():
    assert main(["flow", "--seed", "-1"]) == 2


def test_missing_config(tmp_path):
    assert main(["flow", "--config", str(tmp_path / "missing.json")]) == 2


def test_config_path_is_a_directory(tmp_path):
    assert main(["flow", "--config", str(tmp_path), "--out", str(tmp_path / "out")]) == 2


@pytest.mark.parametrize("data", [{"flow": {"steps": -1}}, {"unknown": True}])
def test_bad_config(tmp_path, data):
    assert main(["flow", "--config", _write_config(tmp_path, data), "--out", str(tmp_path / "out")]) == 2
    assert not (tmp_path / "out").exists()


def test_flow_writes_report_and_trajectory(tmp_path, flow_config):
    out = tmp_path / "out"
    assert main(["flow", "--config", flow_config, "--out", str(out)]) == 0

    with (out / "trajectory.csv").open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0][:8] == ["sigma", "x", "y", "t", "m11", "m12", "m21", "m22"]
    assert rows[0][-2:] == ["config_hash", "version"]
    assert len(rows) == 1 + 257

    report = json.loads((out / "flow_report.json").read_text(encoding="utf-8"))
    assert report["potential"] == "t"
    assert report["steps"] == 256
    assert len(report["meta"]["config_hash"]) == 64
    assert rows[1][-2] == report["meta"]["config_hash"]
    assert report["config"]["seed"] == 1


def test_reruns_are_byte_identical(tmp_path, flow_config):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["flow", "--config", flow_config, "--out", str(first)]) == 0
    assert main(["flow", "--config", flow_config, "--out", str(second)]) == 0
    for name in ("flow_report.json", "trajectory.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_flow_from_singular_start_fails(tmp_path):
    config = _write_config(tmp_path, {
        "quadrature": SMALL_QUADRATURE,
        "flow": {"potential": "log-gauge", "start": [0.0, 0.0, 0.0], "base_points": 4, "volume_check": False},
    })
    assert main(["flow", "--config", config, "--out", str(tmp_path / "out")]) == 1


def test_verify_group_filter(tmp_path):
    config = _write_config(tmp_path, {"verify": {"group_cases": 1000, "bracket_points": 50}})
    out = tmp_path / "out"
    assert main(["verify", "--config", config, "--filter", "group", "--out", str(out)]) == 0
    report = json.loads((out / "verify_report.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["groups"] == ["group"]
    assert report["filter"] == "group"


def test_verify_unknown_filter(tmp_path):
    assert main(["verify", "--filter", "nope", "--out", str(tmp_path / "out")]) == 2


def test_metric_of_identity(tmp_path):
    config = _write_config(tmp_path, {
        "quadrature": SMALL_QUADRATURE,
        "metric": {"pairs": 2, "waypoint_ladder": [4, 8], "restarts": 1, "doubling_radii": [0.5]},
    })
    out = tmp_path / "out"
    assert main(["metric", "--config", config, "--out", str(out)]) == 0
    report = json.loads((out / "metric_report.json").read_text(encoding="utf-8"))
    assert report["rho_f_over_rho_w"]["mean"] == pytest.approx(1.0, rel=1e-9)
    assert report["n_pairs"] == 2
    with (out / "comparability.csv").open(newline="", encoding="utf-8") as f:
        assert len(list(csv.reader(f))) == 3


def test_zero_time_flow_is_the_identity(tmp_path):
    config = _write_config(tmp_path, {
        "quadrature": SMALL_QUADRATURE,
        "flow": {"potential": "x2", "time": 0.0, "steps": 4, "base_points": 4, "volume_check": False, "strain_radius": 1.0},
    })
    out = tmp_path / "out"
    assert main(["flow", "--config", config, "--out", str(out)]) == 0

    report = json.loads((out / "flow_report.json").read_text(encoding="utf-8"))
    assert report["endpoint"] == report["start"]
    assert report["integration_error"] == 0.0
    assert report["dilatation"]["analytic_max"] == pytest.approx(1.0)
    with (out / "trajectory.csv").open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert len(rows) == 1 + 5
    assert [float(v) for v in rows[-1][1:8]] == [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]


def test_iterate_sweep_reports_every_m(tmp_path):
    config = _write_config(tmp_path, {
        "quadrature": SMALL_QUADRATURE,
        "iteration": {
            "sweep": [1, 2],
            "flow_steps": 4,
            "table_radius": 2.0,
            "jacobian_table_radius": 2.0,
            "table_resolution": 5,
            "kernel_nodes": 8,
            "grid_points": 32,
        },
    })
    out = tmp_path / "out"
    assert main(["iterate", "--config", config, "--out", str(out)]) == 0

    report = json.loads((out / "iterate_report.json").read_text(encoding="utf-8"))
    assert report["m"] == 2
    assert report["sweep"]["ms"] == [1, 2]
    assert len(report["sweep"]["spreads"]) == 2
    assert report["sweep"]["weak_jacobian"]["residuals"][-1] == 0.0
    assert (out / "iterate_ratios.csv").exists()
