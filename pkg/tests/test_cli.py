import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from chshstar import cli, photonics


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema_version=1 ")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_sweep_csv(capsys):
    code, out = run(["sweep", "--steps", "10", "--shots", "38000", "--seed", "42", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "theta_rad,w_exact,w_hat,stderr,shots,seed"
    rows = csv_rows(out)
    assert len(rows) == 11
    row = next(r for r in rows if r["theta_rad"] == "0.7853982")
    assert row["w_exact"] == "0.8535534"
    assert all(r["shots"] == "38000" and r["seed"] == "42" for r in rows)


def test_sweep_single_shot(capsys):
    _, out = run(["sweep", "--shots", "1", "--format", "csv"], capsys)
    assert {r["w_hat"] for r in csv_rows(out)} <= {"0", "1"}


def test_json_layout(capsys):
    _, out = run(["sweep", "--steps", "2", "--shots", "100"], capsys)
    doc = json.loads(out)
    assert set(doc) == {"schema_version", "command", "config", "rows"}
    assert doc["schema_version"] == 1 and doc["command"] == "sweep"
    assert doc["config"]["shots"] == 100
    for row in doc["rows"]:
        assert set(row) == {"theta_rad", "w_exact", "w_hat", "stderr", "shots", "seed"}
        assert all(isinstance(v, (int, float)) for v in row.values())


def test_search_commands(capsys):
    _, out = run(["search", "--setting", "classical"], capsys)
    assert json.loads(out)["rows"][0]["best_w"] == 0.75
    _, out = run(["search", "--setting", "permutation", "--d", "3"], capsys)
    row = json.loads(out)["rows"][0]
    assert row["best_w"] == 1.0 and row["n_optima"] == 864
    assert all(set(o) == {"init", "A0", "A1", "B0", "B1", "meas"} for o in row["optima"])
    code, out = run(["search", "--setting", "clifford", "--format", "csv"], capsys)
    rows = csv_rows(out)
    assert code == 0 and rows[0]["best_w"] == "0.75" and rows[0]["search_space_size"] == "331776"
    assert "elapsed" not in out


def test_optimize_d2(capsys):
    argv = ["optimize", "--d", "2", "--restarts", "50", "--seed", "1"]
    code, first = run(argv, capsys)
    assert code == 0
    assert json.loads(first)["rows"][0]["best_w"] == pytest.approx(np.cos(np.pi / 8) ** 2, abs=1e-6)
    _, second = run(argv, capsys)
    assert first == second


def test_optimize_workers_do_not_change_output(capsys):
    base = ["optimize", "--restarts", "4", "--seed", "3", "--format", "csv"]
    _, one = run(base, capsys)
    _, four = run(base + ["--workers", "4"], capsys)
    assert one == four


def test_compile_check(capsys):
    code, out = run(["compile-check", "--theta-grid", "0,-0.7853981633974483", "--format", "csv"], capsys)
    rows = csv_rows(out)
    assert code == 0
    assert [float(r["residual"]) <= 1e-10 for r in rows] == [True, True]
    code, out = run(["compile-check"], capsys)
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 1001
    assert max(r["residual"] for r in rows) <= 1e-10


def test_compile_check_failure_exit(capsys, monkeypatch):
    monkeypatch.setattr(photonics, "solve_middle_angle", lambda theta: (0.0, 1.0))
    code, _ = run(["compile-check", "--theta-grid", "0.3"], capsys)
    assert code == 1


def test_crosscheck(capsys):
    code, out = run(["crosscheck", "--format", "csv"], capsys)
    rows = csv_rows(out)
    assert code == 0
    assert [r["value"] for r in rows] == ["0.75", "0.8535534", "1"]


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--shots", "0"],
        ["sweep", "--format", "xml"],
        ["sweep", "--flip-error-prob", "2"],
        ["sweep", "--angle-jitter-sigma", "-1"],
        ["sweep", "--theta-grid", "a,b"],
        ["search", "--setting", "permutation", "--d", "7"],
        ["search", "--setting", "bogus"],
        ["optimize", "--d", "4"],
        ["optimize", "--tol", "1e-20"],
        ["nonsense"],
        [],
    ],
)
def test_bad_flags_exit_nonzero(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code != 0


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--steps", "4", "--shots", "500", "--seed", "7", "--balanced"],
        ["simulate", "--steps", "3", "--shots", "300", "--angle-jitter-sigma", "0.01", "--flip-error-prob", "0.1"],
        ["sweep", "--theta-grid", "0.1,0.2", "--shots", "50"],
        ["search", "--setting", "permutation", "--d", "2"],
        ["compile-check", "--theta-grid", "0.5,1.5"],
        ["crosscheck"],
    ],
)
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_echoed_config_reproduces_output(argv, fmt, capsys):
    _, out = run(argv + ["--format", fmt], capsys)
    if fmt == "json":
        doc = json.loads(out)
        command, config = doc["command"], doc["config"]
    else:
        head = out.splitlines()[0]
        command = head.split("command=")[1].split()[0]
        config = json.loads(head.split("config=", 1)[1])
    _, again = run(cli.config_to_argv(command, config, fmt), capsys)
    assert again == out


def test_simulate_uses_compiled_optics(capsys):
    _, out = run(["simulate", "--steps", "2", "--shots", "10"], capsys)
    assert json.loads(out)["config"]["use_compiled_optics"] is True


def test_out_file(tmp_path, capsys):
    path = tmp_path / "x.csv"
    assert cli.main(["crosscheck", "--format", "csv", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert path.read_text().splitlines()[1] == "check,value,expected,ok"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chshstar", "crosscheck"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "crosscheck"
