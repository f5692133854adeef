import csv
import io
import json
import math
import subprocess
import sys

import pytest

from imab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestListSetups:
    def test_nats(self, capsys):
        code, out, _ = run_cli(capsys, "list-setups")
        assert code == 0
        data = rows(out)
        assert len(data) == 14
        assert data[0]["entropy_nats"] == "0.5623"
        assert data[13]["kappa_values"] == "10000"

    def test_bits(self, capsys):
        _, out, _ = run_cli(capsys, "list-setups", "--bits")
        first = rows(out)[0]
        assert float(first["entropy_bits"]) == pytest.approx(0.5623 / math.log(2), abs=1e-4)

    def test_json(self, capsys):
        _, out, _ = run_cli(capsys, "list-setups", "--format", "json")
        assert json.loads(out)[2]["setup_id"] == "2"


class TestRun:
    def test_stdout_aggregate(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--setup", "2", "--policy", "tv", "--kappa", "2",
                               "--horizon", "2000", "--reps", "3", "--seed", "5")
        assert code == 0
        data = rows(out)
        assert data[-1]["t"] == "2000" and data[-1]["replications"] == "3"

    def test_out_dir_and_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"setup_id": 3, "horizon": 500, "replications": 9,
                                   "policies": ["bias"], "kappa_values": [10]}))
        code, _, err = run_cli(capsys, "run", "--config", str(cfg), "--reps", "2",
                               "--out", str(tmp_path / "o"), "--format", "json")
        assert code == 0
        raw = rows((tmp_path / "o" / "raw.csv").read_text())
        assert {r["replication"] for r in raw} == {"0", "1"}
        assert {r["kappa"] for r in raw} == {"10"} and raw[0]["setup_id"] == "3"
        assert json.loads((tmp_path / "o" / "aggregate.json").read_text())
        assert "raw.csv" in err

    def test_comma_lists(self, capsys):
        _, out, _ = run_cli(capsys, "run", "--policy", "bias,se", "--kappa", "2,10",
                            "--horizon", "300", "--reps", "1")
        assert {(r["policy"], r["kappa"]) for r in rows(out)} == {
            ("bias", "2"), ("bias", "10"), ("se", "2"), ("se", "10")}

    @pytest.mark.parametrize("argv", [
        ["run", "--setup", "9"],
        ["run", "--policy", "kl", "--horizon", "100"],
        ["run", "--setup", "4", "--kappa", "2", "--horizon", "100"],
        ["run", "--reps", "0"],
        ["run", "--config", "/nonexistent.json"],
        ["coverage", "--kind", "ber", "--setup", "4", "--n", "1000"],
    ])
    def test_config_errors(self, capsys, argv):
        code, _, err = run_cli(capsys, *argv)
        assert code == 2
        assert err.startswith("imab: error:")


class TestBounds:
    def test_setup1(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--setup", "1", "--kappa", "2", "--t", "1000,100000")
        assert code == 0
        data = rows(out)
        quantities = {r["quantity"] for r in data}
        assert {"thm1", "thm2", "thm5", "thm6", "lai_robbins", "lai_robbins_constant"} == quantities
        const = [r for r in data if r["quantity"] == "lai_robbins_constant"][0]
        assert float(const["value"]) == pytest.approx(2.0865, abs=1e-3)

    def test_ternary(self, capsys):
        _, out, _ = run_cli(capsys, "bounds", "--setup", "4", "--t", "1e4")
        assert {r["quantity"] for r in rows(out)} == {"thm1", "thm5", "thm6"}


class TestCoverage:
    def test_probs(self, capsys):
        code, out, _ = run_cli(capsys, "coverage", "--kind", "ber_half", "--probs", "0.55,0.45",
                               "--n", "263", "--trials", "2000", "--regime")
        assert code == 0
        r = rows(out)[0]
        assert r["in_regime"] == "true" and float(r["fraction"]) <= 0.05

    def test_setup_arm(self, capsys):
        _, out, _ = run_cli(capsys, "coverage", "--kind", "tv", "--setup", "4", "--arm", "1",
                            "--n", "500", "--trials", "500", "--format", "json")
        assert json.loads(out)["kind"] == "tv"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "imab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
