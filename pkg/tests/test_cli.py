"""Command-line interface: outputs, exit codes and determinism."""

import json
from pathlib import Path

import numpy as np

from semiband.cli import main


def write_config(tmp_path: Path, payload: dict, name: str = "cfg.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


DIRAC_CFG = {
    "model": {"model": "dirac_electric", "m": 1.0, "e": 1.0,
              "field": {"kind": "gaussian", "amplitude": 0.5,
                        "center": [0, 0, 0], "width": 1.5}},
    "hbar": 0.01,
    "seed": 7,
    "points": [{"R": [0.1, 0.2, 0.3], "P": [0.5, -0.4, 0.8]}],
}


def test_diagonalize_single_point(tmp_path):
    cfg = write_config(tmp_path, DIRAC_CFG)
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "diagonalize"]) == 0
    lines = (out / "energies.csv").read_text().strip().splitlines()
    assert len(lines) == 2  # header + one row
    report = json.loads((out / "energies.json").read_text())
    assert report["schema_version"] == 1
    assert len(report["records"]) == 1
    assert report["errors"] == []


def test_diagonalize_grid_row_count(tmp_path):
    cfg_data = dict(DIRAC_CFG)
    cfg_data.pop("points")
    cfg_data["grid"] = {"R": [[0, 0, 1], [0, 0, 1], [0, 0, 1]],
                        "P": [[0.5, 1.5, 3], [0.2, 0.2, 1], [-0.3, 0.3, 2]]}
    cfg = write_config(tmp_path, cfg_data)
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "diagonalize"]) == 0
    rows = (out / "energies.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 3 * 1 * 2


def test_diagonalize_invalid_model_exits_one(tmp_path):
    cfg = write_config(tmp_path, {"model": {"model": "bogus"}, "points": []})
    assert main(["--config", cfg, "--out", str(tmp_path / "o"),
                 "diagonalize"]) == 1


def test_point_level_errors_exit_two(tmp_path):
    cfg = write_config(tmp_path, {
        "model": {"model": "neutrino_metric",
                  "field": {"kind": "uniform", "value": 1.0}},
        "points": [{"R": [0, 0, 0], "P": [0, 0, 1]},
                   {"R": [0, 0, 0], "P": [0, 0, 0]}],
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "diagonalize"]) == 2
    report = json.loads((out / "energies.json").read_text())
    assert len(report["records"]) == 1
    assert len(report["errors"]) == 1
    assert report["errors"][0]["index"] == 1


def test_diagonalize_deterministic_bytes(tmp_path):
    cfg_data = dict(DIRAC_CFG)
    cfg_data.pop("points")
    cfg_data["random_points"] = {"count": 4, "p_range": [0.5, 2.0]}
    cfg = write_config(tmp_path, cfg_data)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out1), "diagonalize"]) == 0
    assert main(["--config", cfg, "--out", str(out2), "diagonalize"]) == 0
    assert (out1 / "energies.json").read_bytes() == \
        (out2 / "energies.json").read_bytes()
    assert (out1 / "energies.csv").read_bytes() == \
        (out2 / "energies.csv").read_bytes()


def test_connections_and_jobs_flag(tmp_path):
    cfg_data = dict(DIRAC_CFG)
    cfg_data["points"] = [{"R": [0, 0, 0], "P": [0.5, 0.1, 0.9]},
                          {"R": [0.1, 0, 0], "P": [0.2, -0.6, 1.1]}]
    cfg = write_config(tmp_path, cfg_data)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["--config", cfg, "--out", str(out1), "connections"]) == 0
    assert main(["--config", cfg, "--out", str(out2), "--jobs", "4",
                 "connections"]) == 0
    # A worker pool must not change the result ordering or the values.
    assert (out1 / "connections.json").read_bytes() == \
        (out2 / "connections.json").read_bytes()


def test_curvature_output(tmp_path):
    cfg = write_config(tmp_path, {
        "model": {"model": "neutrino_metric",
                  "field": {"kind": "gaussian", "amplitude": 0.4,
                            "center": [0.3, 0.1, -0.2], "width": 2.0}},
        "hbar": 0.01,
        "points": [{"R": [0.1, 0.2, 0.3], "P": [0.4, -0.7, 0.5]}],
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "curvature"]) == 0
    rec = json.loads((out / "curvature.json").read_text())["records"][0]
    P = np.array(rec["P"])
    closed = -P / np.linalg.norm(P) ** 3
    assert np.max(np.abs(np.array(rec["band_theta_lam+1"]) - closed)) <= 1e-8


def test_trajectory_outputs_and_bad_dt(tmp_path):
    cfg = write_config(tmp_path, {
        "model": {"model": "neutrino_metric",
                  "field": {"kind": "linear", "gradient": [0.05, 0, 0],
                            "offset": 1.5}},
        "hbar": 0.001,
        "trajectory": {"r0": [0, 0, 0], "P0": [0, 0, 1.0], "dt": 0.01,
                       "steps": 100, "method": "rk4", "pair_lambdas": True},
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "trajectory"]) == 0
    for lam in ("+1", "-1"):
        lines = (out / f"trajectory_lam{lam}.csv").read_text().splitlines()
        assert lines[0].split(",") == ["t", "r_x", "r_y", "r_z", "P_x", "P_y",
                                       "P_z", "lambda", "eps", "speed"]
        assert len(lines) == 102
    manifest = json.loads((out / "trajectory_manifest.json").read_text())
    assert len(manifest["runs"]) == 2
    assert manifest["runs"][0]["helicity_drift"] <= 1e-9

    bad = write_config(tmp_path, {
        "model": {"model": "neutrino_metric",
                  "field": {"kind": "uniform", "value": 1.0}},
        "trajectory": {"dt": -1.0, "steps": 10},
    }, name="bad.json")
    assert main(["--config", bad, "--out", str(out), "trajectory"]) == 1


def test_verify_suite_filter_and_tamper(tmp_path):
    out = tmp_path / "out"
    assert main(["--out", str(out), "--suite", "bracket", "verify"]) == 0
    report = json.loads((out / "verify_report.json").read_text())
    names = [s["name"] for s in report["suites"]]
    assert names == ["bracket-product-rule", "bracket-invariance",
                     "symmetrized-bracket"]

    # An absurd tolerance must surface as a listed failure and exit code 2.
    cfg = write_config(tmp_path, {
        "suites": {"neutrino-curvature": {"tolerance": 1e-20, "points": 2}}})
    code = main(["--config", cfg, "--out", str(out), "--suite",
                 "neutrino-curvature", "verify"])
    assert code == 2
    report = json.loads((out / "verify_report.json").read_text())
    assert report["suites"][0]["passed"] is False

    assert main(["--out", str(out), "--suite", "no-such-suite", "verify"]) == 1


def test_bracket_check_command(tmp_path):
    out = tmp_path / "out"
    assert main(["--out", str(out), "--seed", "1", "bracket-check"]) == 0
    report = json.loads((out / "bracket_report.json").read_text())
    assert report["cases"] == 200
    assert report["exact"] == 200
    assert report["pure_sum_brackets_vanish"] is True

    cfg = write_config(tmp_path, {"max_degree": 9})
    assert main(["--config", cfg, "--out", str(out), "bracket-check"]) == 1
