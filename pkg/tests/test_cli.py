import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from liemoment.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SU2 = str(CONFIGS / "su2.json")
CUBIC = str(CONFIGS / "cubic.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("path, code", [(SU2, 0), (CUBIC, 0), (str(CONFIGS / "broken_jacobi.json"), 1),
                                        (str(CONFIGS / "missing.json"), 2)])
def test_check_exit_codes(capsys, path, code):
    got, out, _ = run(capsys, "check", "--algebra", path)
    assert got == code
    if code < 2:
        assert json.loads(out)["valid"] is (code == 0)


def test_non_central_casimir(capsys, tmp_path):
    data = json.loads(Path(SU2).read_text())
    data["casimir"] = {"1,0,0": "1"}
    path = tmp_path / "a.json"
    path.write_text(json.dumps(data))
    assert run(capsys, "check", "--algebra", str(path))[0] == 1
    assert run(capsys, "constraints", "--algebra", str(path), "--order", "3")[0] == 1


def test_usage_errors(capsys):
    assert run(capsys, "constraints", "--algebra", SU2)[0] == 2
    assert run(capsys, "constraints", "--algebra", SU2, "--order", "1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "independence", "--algebra", CUBIC, "--order", "4")[0] == 2
    assert run(capsys, "independence", "--algebra", CUBIC, "--order", "4", "--point", "x1=0",
               "--tolerance", "0")[0] == 2
    assert run(capsys, "independence", "--algebra", CUBIC, "--order", "4", "--point", "x9=0")[0] == 2


def test_constraints_census(capsys):
    code, out, _ = run(capsys, "constraints", "--algebra", SU2, "--order", "4")
    data = json.loads(out)
    assert code == 0 and data["census_ok"] and data["count"] == 1 + 3 + 6 + 10
    assert data["census"] == {"0": 1, "1": 3, "2": 6, "3": 10}


def test_bracket_table(capsys):
    code, out, _ = run(capsys, "bracket-table", "--algebra", SU2, "--order", "2")
    assert code == 0 and json.loads(out)["{x1, x2}"] == "1 * x3"


def test_independence_point(capsys, tmp_path):
    dest = tmp_path / "rep.json"
    code, _, _ = run(capsys, "independence", "--algebra", CUBIC, "--order", "4", "--point", "x1=0",
                     "--out", str(dest))
    data = json.loads(dest.read_text())
    assert code == 0 and data["deficient"] and data["kernel"] == [["1", "1", "0"]]
    code, out, _ = run(capsys, "independence", "--algebra", SU2, "--order", "3", "--point", "x1=0")
    assert code == 1 and json.loads(out)["dC_zero"]


def test_independence_full_gradient(capsys):
    code, out, _ = run(capsys, "independence", "--algebra", SU2, "--order", "3",
                       "--point", "x1=1", "--hbar", "0.001", "--full")
    data = json.loads(out)
    assert code == 0 and data["full_rank"] == data["rank"] == 9


def test_independence_grid(capsys):
    code, out, _ = run(capsys, "independence", "--algebra", CUBIC, "--order", "4",
                       "--grid", "x1=-1:2:1/20")
    lines = [json.loads(s) for s in out.splitlines()]
    assert code == 0 and len(lines) == 61 + 1
    assert lines[-1]["deficient_points"] == [["0"]]
    code, out, _ = run(capsys, "independence", "--algebra", CUBIC, "--order", "6",
                       "--grid", "x1=-1:2:1/20")
    assert json.loads(out.splitlines()[-1])["deficient_points"] == []


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_evolve_from_file(capsys, tmp_path):
    dest = tmp_path / "run.csv"
    code, out, _ = run(capsys, "evolve", "--algebra", SU2, "--order", "2",
                       "--hamiltonian", str(CONFIGS / "h_x3.json"),
                       "--initial", str(CONFIGS / "initial_rotation.json"),
                       "--dt", "0.01", "--t-end", "1")
    assert code == 2  # --out missing
    code, out, _ = run(capsys, "evolve", "--algebra", SU2, "--order", "2",
                       "--hamiltonian", str(CONFIGS / "h_x3.json"),
                       "--initial", str(CONFIGS / "initial_rotation.json"),
                       "--dt", "0.01", "--t-end", "1", "--out", str(dest))
    assert code == 0
    rows = _read_csv(dest)
    assert len(rows) == 101
    assert float(rows[-1]["x1"]) == pytest.approx(0.5403023058681398, abs=1e-9)
    side = json.loads(Path(str(dest) + ".json").read_text())
    assert side["order"] == 2 and side["conservation"]["H_drift"] <= 1e-10


def test_evolve_with_oracle(capsys, tmp_path):
    dest = tmp_path / "run.csv"
    code, out, _ = run(capsys, "evolve", "--algebra", SU2, "--order", "2",
                       "--hamiltonian", str(CONFIGS / "h_x3.json"),
                       "--initial", "coherent:j=5,theta=0.8,phi=0.3", "--oracle", "5",
                       "--hbar", "0.2", "--dt", "0.001", "--t-end", "2", "--out", str(dest))
    assert code == 0
    assert json.loads(out)["oracle_max_deviation"] < 1e-10
    assert "oracle_x1" in _read_csv(dest)[0]


def test_evolve_incomplete_initial_data(capsys, tmp_path):
    init = tmp_path / "init.json"
    init.write_text(json.dumps({"x": [1, 0, 0], "eps": {"2,0,0": 0}, "hbar": 0.1}))
    code, _, err = run(capsys, "evolve", "--algebra", SU2, "--order", "2",
                       "--hamiltonian", str(CONFIGS / "h_x3.json"), "--initial", str(init),
                       "--out", str(tmp_path / "o.csv"))
    assert code == 2 and "eps" in err
    init.write_text(json.dumps({"eps": {}}))
    assert run(capsys, "evolve", "--algebra", SU2, "--order", "2",
               "--hamiltonian", str(CONFIGS / "h_x3.json"), "--initial", str(init),
               "--out", str(tmp_path / "o.csv"))[0] == 2


def test_oracle_compare(capsys):
    code, out, _ = run(capsys, "oracle-compare", "--algebra", SU2, "--oracle", "1",
                       "--hbar", "0.7", "--samples", "20")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["max_error"] < 1e-10
    assert run(capsys, "oracle-compare", "--algebra", CUBIC, "--oracle", "1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "liemoment", "check", "--algebra", SU2],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["casimir_central"] is True
