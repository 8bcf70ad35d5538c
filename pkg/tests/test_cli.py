"""Command-line harness tests: exit codes, report round trips, sweeps."""

import csv
import json

import numpy as np
import pytest

from qmcast.cli import main


def test_code_butterfly_feasible(tmp_path):
    out = tmp_path / "code.json"
    rc = main(["code", "--network", "butterfly", "--rate", "2", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["feasible"] is True
    assert doc["min_cuts"] == {"t1": 2, "t2": 2}
    assert "code" in doc


def test_code_infeasible_rate_exits_2(tmp_path, capsys):
    rc = main(["code", "--network", "butterfly", "--rate", "3",
               "--out", str(tmp_path / "x.json")])
    assert rc == 2
    assert "infeasible" in capsys.readouterr().err


def test_unknown_network_exits_2(tmp_path):
    assert main(["code", "--network", str(tmp_path / "missing.json"),
                 "--rate", "1"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["code", "--network", str(bad), "--rate", "1"]) == 2


def test_run_ghz_and_replay(tmp_path):
    report = tmp_path / "ghz.json"
    rc = main(["run", "ghz", "--network", "chain", "--rate", "1",
               "--seed", "4", "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    assert doc["branches"] > 0
    assert main(["verify", "--report", str(report)]) == 0


def test_run_clone12_and_replay(tmp_path):
    report = tmp_path / "c12.json"
    rc = main(["run", "clone12", "--network", "tree2", "--rate", "1",
               "--seed", "1", "--b", "0.4", "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    assert doc["trace_distance"] < 1e-9
    assert main(["verify", "--report", str(report)]) == 0


def test_run_clone13_and_replay(tmp_path):
    report = tmp_path / "c13.json"
    rc = main(["run", "clone13", "--network", "tree3", "--rate", "1",
               "--seed", "2", "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    assert main(["verify", "--report", str(report)]) == 0


def test_run_with_state_file(tmp_path):
    state = tmp_path / "state.json"
    state.write_text(json.dumps([[1.0, 0.0], [0.0, 0.0]]))
    report = tmp_path / "r.json"
    rc = main(["run", "ghz", "--network", "tree2", "--rate", "1",
               "--state", str(state), "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["state"][0] == [1.0, 0.0]


def test_invalid_clone_params_exit_2(capsys):
    rc = main(["run", "clone12", "--network", "tree2", "--rate", "1",
               "--a", "1.0", "--b", "1.0"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_sweep_clone12_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "clone12", "--d", "2", "--points", "5",
               "--format", "csv", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 5
    for row in rows:
        assert float(row["deviation"]) < 1e-9
    # the b = 1/sqrt(3) point of a denser sweep hits 5/6 (symmetric cloning)
    sym = [r for r in rows if abs(float(r["a"]) - float(r["b"])) < 1e-9]
    for r in sym:
        assert float(r["analytic_F1"]) == pytest.approx(float(r["analytic_F2"]))


def test_sweep_clone13_json(tmp_path):
    out = tmp_path / "sweep13.json"
    rc = main(["sweep", "clone13", "--d", "2", "--points", "5",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["max_deviation"] < 1e-9
    assert len(doc["rows"]) == 5


def test_replay_determinism(tmp_path):
    """Two replays of the same report agree, and match the original run."""
    report = tmp_path / "det.json"
    assert main(["run", "clone12", "--network", "tree2", "--rate", "1",
                 "--seed", "9", "--out", str(report)]) == 0
    assert main(["verify", "--report", str(report)]) == 0
    assert main(["verify", "--report", str(report)]) == 0
