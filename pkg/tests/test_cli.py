import csv
import json
import math
import subprocess
import sys

import pytest

from ostat.cli import run_cli
from ostat.distributions import Normal
from ostat.sampler import sample_order_stats, stream


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_envelope_example(tmp_path):
    out = tmp_path / "env.csv"
    assert run_cli(["envelope", "--dist", "uniform", "--n", "9", "--band", "additive",
                    "--t", "0.2", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["index", "q", "x_star", "lower", "upper"]
    row5 = rows[5]
    assert row5[0] == "5"
    assert float(row5[3]) == pytest.approx(0.3, abs=1e-15)
    assert float(row5[4]) == pytest.approx(0.7, abs=1e-15)
    assert rows[1][3] == "-inf" and rows[9][4] == "inf"
    manifest = json.loads((tmp_path / "env.csv.manifest.json").read_text())
    assert manifest["command"] == "envelope"
    assert manifest["outputs"] == [str(out)]


def test_verify_example(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run_cli(["verify", "--suite", "lemma2", "--n", "2000", "--t", "0.1", "--trials", "5000",
                    "--seed", "42", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["coverage"]["empirical"] >= 0.963369
    assert set(report) >= {"config", "coverage", "deviation"}
    assert set(report["coverage"]) == {"trials", "hits", "empirical", "wilson99", "nominal"}
    assert set(report["deviation"]) == {"median", "q90", "q99", "mean", "max"}
    assert "lemma2: PASS" in capsys.readouterr().out


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run_cli(["simulate", "--dist", "normal", "--n", "10", "--seed", "1", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    values = [float(r[1]) for r in _rows(a)[1:]]
    assert values == list(sample_order_stats(Normal(), 10, stream(1)).values)


def test_verify_workers_byte_identical(tmp_path):
    paths = []
    for w in (1, 4):
        out, rec = tmp_path / f"r{w}.json", tmp_path / f"r{w}.jsonl"
        assert run_cli(["verify", "--suite", "lemma2", "--n", "500", "--t", "0.05", "--trials", "300",
                        "--seed", "3", "--workers", str(w), "--out", str(out), "--records", str(rec)]) == 0
        paths.append((out, rec))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()
    first = json.loads(paths[0][1].read_text().splitlines()[0])
    assert set(first) == {"trial", "sup_dev", "trimmed_sup_dev", "covered"}
    assert first["trial"] == 0 and isinstance(first["covered"], bool)


def test_stdout_when_no_out(capsys):
    assert run_cli(["simulate", "--dist", "exponential", "--rate", "2", "--n", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,value" and len(lines) == 4


def test_seed_from_environment(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("OSTAT_SEED", "77")
    run_cli(["simulate", "--n", "5", "--out", str(a)])
    monkeypatch.delenv("OSTAT_SEED")
    run_cli(["simulate", "--n", "5", "--seed", "77", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "a.csv.manifest.json").read_text())["master_seed"] == 77


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dist": "laplace", "n": 6, "seed": 5, "scale": 2.0}))
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert run_cli(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
    assert run_cli(["simulate", "--dist", "laplace", "--scale", "2", "--n", "6", "--seed", "5",
                    "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert run_cli(["simulate", "--config", str(cfg), "--n", "4", "--out", str(c)]) == 0
    assert len(_rows(c)) == 5


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nope"],
    ["envelope", "--dist", "uniform", "--n", "9", "--band", "ratio", "--T", "1.0"],
    ["envelope", "--dist", "uniform", "--n", "9", "--band", "ratio"],
    ["simulate", "--dist", "normal", "--rate", "3", "--n", "4"],
    ["simulate", "--n", "0"],
    ["simulate", "--n", "4", "--seed", "-1"],
    ["simulate", "--n", "4", "--out", "/nonexistent-dir/x.csv"],
    ["simulate", "--n", "4", "--config", "/nonexistent.json"],
    ["frobnicate"],
])
def test_configuration_errors_exit_one(argv, capsys):
    assert run_cli(argv) == 1
    assert "error" in capsys.readouterr().err


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "colour": "red"}))
    assert run_cli(["simulate", "--config", str(cfg)]) == 1


def test_calibrate(tmp_path):
    out = tmp_path / "c.json"
    assert run_cli(["calibrate", "--dist", "normal", "--n-cal", "200", "--trials", "100",
                    "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for key in ("rate_constant", "quantile_gap_bound", "quantile_tail_bound", "central_lipschitz",
                "theta_lipschitz"):
        assert math.isfinite(doc[key]["c"]) and doc[key]["c"] > 0


def test_rate(tmp_path):
    out = tmp_path / "rate.csv"
    assert run_cli(["rate", "--dist", "normal", "--n-list", "100,1000", "--trials", "20",
                    "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["n", "median_sup_dev", "rate", "ratio"]
    assert [r[0] for r in rows[1:]] == ["100", "1000"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    res = subprocess.run([sys.executable, "-m", "ostat", "simulate", "--n", "3", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    bad = subprocess.run([sys.executable, "-m", "ostat", "simulate", "--n", "0"],
                         capture_output=True, text=True)
    assert bad.returncode == 1
