import csv
import io
import json
import os
import subprocess
import sys

import pytest

from arakelov.cli import main
from arakelov.ledger import DEFAULT_LEDGER, ENV_VAR

EXAMPLES = [
    ["phi", "--p", "23", "--e", "1", "--target", "zero"],
    ["bound", "--p", "101", "--err-mode", "p3"],
    ["brumer-scan", "--from", "19", "--to", "97", "--out", "csv"],
]


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def run_proc(argv, env=None):
    e = dict(os.environ)
    e.pop(ENV_VAR, None)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "arakelov", *argv], capture_output=True, env=e)


def test_phi_example():
    code, text = run(EXAMPLES[0])
    assert code == 0
    js = json.loads(text)
    vals = {json.dumps(c["component"], sort_keys=True): c["value"] for c in js["coefficients"]}
    assert vals['{"t": "zero"}'] == "-6/11"
    assert vals['{"t": "inf"}'] == "0/1"


def test_phi_closed_form_flag_matches():
    assert run(EXAMPLES[0])[1] == run(EXAMPLES[0] + ["--closed-form"])[1]


def test_bound_example():
    code, text = run(EXAMPLES[1])
    assert code == 0
    js = json.loads(text)
    assert js["p"] == 101 and js["err_mode"] == "p3"
    assert "b" in js and js["ledger"]["c_MU"]["provenance"] == "placeholder"


def test_brumer_scan_example():
    code, text = run(EXAMPLES[2])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["p"]) for r in rows] == [19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
    assert all(int(r["dim_Je"]) <= int(r["dim_minus"]) for r in rows)


def test_scan_formats_and_write(tmp_path):
    _, j = run(["brumer-scan", "--from", "19", "--to", "40"])
    assert [r["p"] for r in json.loads(j)] == [19, 23, 29, 31, 37]
    path = tmp_path / "scan.csv"
    code, text = run(["brumer-scan", "--from", "19", "--to", "40", "--format", "csv", "--write", str(path)])
    assert code == 0 and text == ""
    assert path.read_text() == run(["brumer-scan", "--from", "19", "--to", "40", "--format", "csv"])[1]
    assert run(["brumer-scan", "--from", "19", "--to", "40", "--jobs", "2"])[1] == j


@pytest.mark.parametrize("argv", [
    ["fiber", "--p", "37", "--e", "2"],
    ["omega", "--p", "23"],
    ["cusp", "--p", "23"],
    ["matrix", "--p", "19"],
    ["phi", "--p", "23", "--target", "2,1"],
    ["bezout", "--p", "101", "--dV", "1", "--dW", "1", "--degV", "2", "--degW", "3", "--hV", "1/2", "--hW", "5"],
    ["winding", "--p", "37"],
    ["theta", "--tau", "1j", "--z", "0"],
    ["theta", "--tau", "1j,0.1,0.1,2j", "--z", "0.1,0.2j"],
])
def test_commands_emit_json(argv):
    code, text = run(argv)
    assert code == 0
    json.loads(text)


def test_specific_outputs():
    assert json.loads(run(["fiber", "--p", "23"])[1])["eichler_mass"] == "11/6"
    assert json.loads(run(["winding", "--p", "37"])[1])["dim_Je"] == 1
    v = json.loads(run(["theta", "--tau", "1j", "--z", "0"])[1])
    assert abs(v["value"]["re"] - 1.086434811213308) < 1e-12 and v["value"]["im"] == 0


@pytest.mark.parametrize("argv", [
    ["phi", "--p", "21", "--target", "zero"],
    ["phi", "--p", "17", "--target", "zero"],
    ["phi", "--p", "23", "--target", "7,1"],
    ["phi", "--p", "23", "--target", "bogus"],
    ["fiber", "--p", "23", "--e", "0"],
    ["bound", "--p", "67"],
    ["bound", "--p", "101", "--err-mode", "nope"],
    ["bezout", "--p", "23", "--dV", "2", "--dW", "1", "--degV", "1", "--degW", "1", "--hV", "1", "--hW", "1"],
    ["brumer-scan", "--from", "11", "--to", "30"],
    ["theta", "--tau", "-1j", "--z", "0"],
    ["theta", "--tau", "1j,0", "--z", "0"],
    ["winding", "--p", "22"],
    ["fiber", "--p", "23", "--unknown"],
    ["nosuchcommand"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    code, text = run(argv)
    assert code == 2 and text == ""
    assert capsys.readouterr().err


def test_missing_ledger_notice(capsys):
    run(["bound", "--p", "101"])
    err = capsys.readouterr().err
    assert "placeholder" in err and "c_MU" in err and "c_bezout_err3" in err and "c_bezout_err1" not in err
    run(["fiber", "--p", "23"])
    assert capsys.readouterr().err == ""


def test_ledger_flag_and_env(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    path = tmp_path / "ledger.txt"
    path.write_text(DEFAULT_LEDGER.with_values(c_MU=3).dumps())
    base = json.loads(run(["bound", "--p", "101"])[1])
    capsys.readouterr()
    flagged = json.loads(run(["bound", "--p", "101", "--ledger", str(path)])[1])
    assert capsys.readouterr().err == ""
    assert flagged["ledger"]["c_MU"]["value"] == "3/1"
    assert flagged["b"] != base["b"]
    monkeypatch.setenv(ENV_VAR, str(path))
    assert json.loads(run(["bound", "--p", "101"])[1]) == flagged
    # every subcommand takes --ledger
    assert run(["fiber", "--p", "23", "--ledger", str(path)])[0] == 0


def test_bad_ledger_exit_2(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("c_MU = 1  # provenance: invented\n")
    assert run(["bound", "--p", "101", "--ledger", str(path)])[0] == 2
    assert run(["bound", "--p", "101", "--ledger", str(tmp_path / "missing")])[0] == 2


def test_subprocess_byte_identical():
    for argv in EXAMPLES:
        a, b = run_proc(argv), run_proc(argv)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout and a.stdout


def test_subprocess_exit_codes():
    assert run_proc(["phi", "--p", "21", "--target", "zero"]).returncode == 2
    assert run_proc(["fiber", "--p", "23", "--bogus"]).returncode == 2
