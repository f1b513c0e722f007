import json
import subprocess
import sys

import pytest

from bvsquares.cli import main
from bvsquares.experiments import ExperimentConfig, UsageError, emit_report, load_report, run_experiment


def run(capsysbinary, *argv):
    rc = main(list(argv))
    out = capsysbinary.readouterr()
    return rc, out.out, out.err


def test_sieve_csv(capsysbinary):
    rc, out, _ = run(capsysbinary, "sieve", "--x", "1000")
    assert rc == 0
    assert out.splitlines()[0].startswith(b"x,")


def test_char_table_json(capsysbinary):
    rc, out, _ = run(capsysbinary, "char-table", "--m", "9", "--format", "json")
    doc = json.loads(out)
    assert rc == 0 and doc["status"] == "PASS"
    assert sorted(r["conductor"] for r in doc["rows"]) == [1, 3, 9, 9, 9, 9]


def test_farey_count(capsysbinary):
    rc, out, _ = run(capsysbinary, "farey-count", "--delta", "1/100", "--Q", "10", "--beta", "1/3")
    assert rc == 0 and len(out.splitlines()) >= 2


def test_large_sieve_pass(capsysbinary):
    rc, out, _ = run(capsysbinary, "large-sieve", "--Q", "4", "--g", "2", "--N", "32", "--family", "random")
    assert rc == 0 and b"false" not in out


def test_usage_errors(capsysbinary):
    assert run(capsysbinary, "sieve")[0] == 1  # missing --x
    assert run(capsysbinary, "ap-error", "--x", "1e4", "--theta", "1.5")[0] == 1
    assert run(capsysbinary, "farey-count", "--delta", "abc", "--Q", "3")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_budget_error(capsysbinary):
    rc, _, err = run(capsysbinary, "char-table", "--m", "2000000")
    assert rc == 2 and b"budget" in err


def test_config_file_and_override(tmp_path, capsysbinary):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"x": [1000], "seed": 4}))
    rc, a, _ = run(capsysbinary, "sieve", "--config", str(cfg))
    rc2, b, _ = run(capsysbinary, "sieve", "--config", str(cfg), "--x", "2000")
    assert rc == rc2 == 0 and a != b and b"2000" in b
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsysbinary, "sieve", "--config", str(cfg))[0] == 1


def test_out_file_and_report(tmp_path, capsysbinary):
    out = tmp_path / "r.json"
    rc, _, _ = run(capsysbinary, "ap-error", "--x", "1e4", "--Q", "20", "--format", "json", "--out", str(out))
    assert rc == 0
    rc, csv_bytes, _ = run(capsysbinary, "report", str(out))
    assert rc == 0 and csv_bytes.startswith(b"x,")
    rc, again, _ = run(capsysbinary, "report", str(out), "--format", "json")
    assert again == out.read_bytes()


def test_timings_flag(capsysbinary):
    _, out, _ = run(capsysbinary, "sieve", "--x", "500", "--timings")
    assert b"runtime_s" in out.splitlines()[0]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bvsquares", "char-table", "--m", "5"], capture_output=True)
    assert r.returncode == 0 and r.stdout.count(b"\n") == 5


def test_config_validation_names_field():
    with pytest.raises(UsageError, match="threads"):
        ExperimentConfig(kind="sieve", x=(10,), threads=0).validate()
    with pytest.raises(UsageError, match="kind"):
        ExperimentConfig(kind="nope").validate()


def test_report_roundtrip():
    rep = run_experiment(ExperimentConfig(kind="char-table", m=12))
    js = emit_report(rep, "json")
    assert emit_report(load_report(js), "json") == js
    with pytest.raises(UsageError):
        emit_report(rep, "xml")


def test_violation_exit_code(monkeypatch, capsysbinary):
    import bvsquares.cli as cli

    def failing(cfg):
        rep = run_experiment(cfg)
        rep.rows[0]["holds"] = False
        rep.status = "FAIL"
        return rep

    monkeypatch.setattr(cli, "run_experiment", failing)
    rc, _, err = run(capsysbinary, "large-sieve", "--Q", "2", "--N", "8")
    assert rc == 3 and b"violated" in err
