import json
import subprocess
import sys

import pytest

from semple import catalog
from semple.cli import SCHEMA, main

REPORT_KEYS = {"schema", "version", "command", "inputs", "seed", "orders", "result",
               "certificates", "timings"}


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def report(capsys, *argv):
    rc, out, _ = run(capsys, *argv, "--json")
    return rc, json.loads(out)


def test_code_report(capsys):
    rc, rep = report(capsys, "code", "--curve", "t^3, t^4, t^5", "--level", "3")
    assert rc == 0
    assert set(rep) == REPORT_KEYS and rep["schema"] == SCHEMA
    assert rep["result"]["word"] == "RVT"
    assert [row["letter"] for row in rep["result"]["levels"]] == ["R", "V", "T"]
    assert rep["timings"] == {}


def test_code_human(capsys):
    rc, out, _ = run(capsys, "code", "--curve", "t^2, t^3, 0", "--level", "2")
    assert rc == 0 and out.splitlines()[0] == "RV"


def test_classes(capsys):
    rc, rep = report(capsys, "classes", "--level", "3")
    assert rc == 0 and rep["result"]["count"] == 6
    assert rep["result"]["classes"] == ["RRR", "RRV", "RVL", "RVR", "RVT", "RVV"]


def test_equiv_exit_codes(capsys):
    rc, rep = report(capsys, "equiv", "--curve", "t^3, t^5, t^7", "--curve", "t^3, t^5, 0",
                     "--level", "3")
    assert rc == 0 and rep["certificates"]["reverified"] is True
    rc, rep = report(capsys, "equiv", "--curve", "t^3, t^4, t^5", "--curve", "t^3, t^4, 0",
                     "--level", "3")
    assert rc == 1 and rep["result"]["verdict"]["verdict"] == "Distinguished"


def test_equiv_unknown_exit(capsys):
    rc, _, _ = run(capsys, "equiv", "--curve", "t^2, t^3, 0", "--curve", "t^2, t^3, t^4",
                   "--level", "3", "--budget", "1")
    assert rc == 4


def test_equiv_needs_two_curves(capsys):
    rc, _, err = run(capsys, "equiv", "--curve", "t, 0, 0", "--level", "1")
    assert rc == 2 and "two" in err


@pytest.mark.parametrize("argv,rc", [
    (["code", "--curve", "t^2, t^3", "--level", "2"], 2),
    (["code", "--curve", "t^9, 0, 0", "--level", "2", "--order", "6"], 2),
    (["code", "--curve", "1, 0, 0", "--level", "1"], 2),
    (["code", "--curve", "t^6, 0, 0", "--level", "3", "--order", "6"], 3),
    (["orbits", "--class", "RT"], 2),
    (["verify", "--levels", "0..9"], 2),
])
def test_error_exit_codes(capsys, argv, rc):
    assert run(capsys, *argv)[0] == rc


def test_orbits(capsys):
    rc, rep = report(capsys, "orbits", "--class", "RVT")
    assert rc == 0
    assert rep["result"]["exact"] == 2
    assert len(rep["certificates"]["orbits"]) == 2


def test_verify_is_byte_identical(capsys):
    a = run(capsys, "verify", "--levels", "1..2", "--json", "--seed", "5")
    b = run(capsys, "verify", "--levels", "1..2", "--json", "--seed", "5")
    assert a[0] == 0 and a[1] == b[1]
    rep = json.loads(a[1])
    assert rep["result"]["failed"] == 0


def test_timings_are_opt_in(capsys):
    _, rep = report(capsys, "classes", "--level", "2", "--timings")
    assert "total" in rep["timings"]


def test_log_append_and_checkpoint(capsys, tmp_path):
    log = tmp_path / "runs.jsonl"
    run(capsys, "orbits", "--class", "RVV", "--log", str(log))
    first = log.read_text().splitlines()
    assert len(first) == 1
    assert json.loads(first[0])["result"]["exact"] == 1
    # an identical rerun is served from the log and adds nothing
    run(capsys, "orbits", "--class", "RVV", "--log", str(log))
    assert log.read_text().splitlines() == first
    # a different seed is a different run
    run(capsys, "orbits", "--class", "RVV", "--log", str(log), "--seed", "1")
    assert len(log.read_text().splitlines()) == 2


def test_checkpoint_is_used(capsys, tmp_path):
    log = tmp_path / "runs.jsonl"
    fake = {"class": "RVV", "lower": 9, "upper": 9, "exact": 9, "moduli_suspected": False,
            "orbits": []}
    catalog.append_record(str(log), {"kind": "orbit_count", "class": "RVV", "seed": 0,
                                     "budget": 20, "version": "0.1.0", "result": fake})
    _, rep = report(capsys, "orbits", "--class", "RVV", "--log", str(log))
    assert rep["result"]["exact"] == 9


def test_log_from_environment(capsys, tmp_path, monkeypatch):
    log = tmp_path / "env.jsonl"
    monkeypatch.setenv("SEMPLE_LOG", str(log))
    run(capsys, "orbits", "--class", "RR")
    assert json.loads(log.read_text())["class"] == "RR"


def test_corrupt_log_lines_are_skipped(tmp_path):
    log = tmp_path / "bad.jsonl"
    log.write_text('{"kind": "x"}\nnot json\n')
    assert catalog.read_records(str(log)) == [{"kind": "x"}]


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "semple.cli", "classes", "--level", "2"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[-1] == "2 classes"
