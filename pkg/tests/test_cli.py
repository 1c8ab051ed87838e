import json
import math
import subprocess
import sys

import pytest

from conemetric.cli import main
from conemetric.verify import corpus_dir

CORPUS = corpus_dir()


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "conemetric", *args],
                          capture_output=True, text=True, timeout=300)
    return proc.returncode, proc.stdout


def call(capsys, *args):
    code = main(list(args))
    return code, json.loads(capsys.readouterr().out)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_build_football(capsys):
    code, out = call(capsys, "build", "--omega", str(CORPUS / "omega_football.json"))
    assert code == 0
    assert out["divisor"] == [{"point": [0.0, 0.0], "alpha": 1.5}, {"point": "inf", "alpha": 1.5}]
    assert out["area"] == pytest.approx(6 * math.pi)
    assert out["trivial"] is False and "reconstruction" not in out


def test_build_with_path_and_loop(capsys, tmp_path):
    path = write(tmp_path, "path.json", {"vertices": [[3, 0], [2.5, 1], [2, 0]], "f_base": 1.125})
    loop = write(tmp_path, "loop.json", {"vertices": [[0.5, 0.5], [1.5, 0.5], [1.5, -0.5], [0.5, -0.5]],
                                         "closed": True})
    code, out = call(capsys, "build", "--omega", str(CORPUS / "omega_zsq_over_zsq_minus_1.json"),
                     "--path", path, "--loop", loop)
    assert code == 0 and out["trivial"]
    assert out["path"]["f_end"][0] == pytest.approx(4 / 3)
    assert out["path"]["psi_end"] == pytest.approx(64 / 25)
    assert out["multipliers"][0] == pytest.approx([1.0, 0.0], abs=1e-9)
    assert out["reconstruction"]["num"][2][0] != 0


def test_analyze_zsq_with_grid(capsys, tmp_path):
    grid = tmp_path / "g.csv"
    code, out = call(capsys, "analyze", "--map", str(CORPUS / "map_zsq.json"),
                     "--grid", str(grid), "--res", "8")
    assert code == 0
    assert out["divisor"] == [{"point": [0.0, 0.0], "alpha": 2.0}, {"point": "inf", "alpha": 2.0}]
    assert out["area"] == pytest.approx(8 * math.pi, rel=1e-6)
    assert all(abs(c["K"] - 1) <= 1e-4 for c in out["curvature_checks"])
    lines = grid.read_text().splitlines()
    assert lines[0] == "x,y,density" and len(lines) == 1 + 64


def test_schwarzian_at_point(capsys):
    code, out = call(capsys, "schwarzian", "--map", str(CORPUS / "map_zsq.json"), "--at", "0,0")
    assert code == 0
    assert out["tails"][0]["c"] == pytest.approx(-1.5)
    assert out["tails"][0]["alpha"] == pytest.approx(2)
    code, out = call(capsys, "schwarzian", "--map", str(CORPUS / "map_zsq.json"))
    assert len(out["tails"]) == 2


def test_frobenius_log_case(capsys, tmp_path):
    q = write(tmp_path, "q.json", {"coeffs": [-0.75, 0.5]})
    code, out = call(capsys, "frobenius", "--q", q, "--alpha", "2", "--order", "12")
    assert code == 0
    assert out["roots"] == [-0.5, 1.5]
    assert out["R_m"] == pytest.approx([0.25, 0.0])
    assert out["logarithmic"] is True
    assert all(s["max_residual"] <= 1e-9 for s in out["solutions"])


def test_feasible(capsys, tmp_path):
    d = write(tmp_path, "d.json", {"entries": [{"point": [0, 0], "alpha": 1.5},
                                               {"point": "inf", "alpha": 2.5}]})
    code, out = call(capsys, "feasible", "--divisor", d)
    assert code == 0 and out["feasible"] is False and out["result"] == "infeasible"
    d = write(tmp_path, "e.json", [{"point": [0, 0], "alpha": 1.5}, {"point": "inf", "alpha": 1.5}])
    code, out = call(capsys, "feasible", "--divisor", d)
    assert out["feasible"] is True and out["assignments"]


def test_cusp(capsys):
    code, out = call(capsys, "cusp", "--preset", "hyp-cusp", "--rmin", "1e-4000")
    assert code == 0 and out["verdict"] == "genuine weak cusp"
    assert out["indicator"] == pytest.approx(2 * math.pi / (4000 * math.log(10)), rel=1e-6)
    code, out = call(capsys, "cusp", "--preset", "sph-cone", "--alpha", "1.5")
    assert out["verdict"] == "no weak cusp"
    assert out["indicator"] == pytest.approx(3 * math.pi, rel=1e-3)


def test_out_flag(capsys, tmp_path):
    dest = tmp_path / "o.json"
    assert main(["build", "--omega", str(CORPUS / "omega_theta.json"), "--out", str(dest)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(dest.read_text())["area"] == pytest.approx(4 * math.pi)


def test_schema_errors_exit_two(capsys, tmp_path):
    code, out = call(capsys, "build", "--omega", str(tmp_path / "nope.json"))
    assert code == 2 and "error" in out
    bad = write(tmp_path, "bad.json", {"poles": "x"})
    code, out = call(capsys, "build", "--omega", bad)
    assert code == 2
    code, out = call(capsys, "cusp", "--preset", "hyp-cusp", "--rmin", "2")
    assert code == 2


def test_computation_errors_exit_one(capsys, tmp_path):
    bad = write(tmp_path, "w.json", {"poles": [{"point": [0, 0], "residue": 1}]})
    code, out = call(capsys, "build", "--omega", bad)
    assert code == 1 and out["type"] == "ConeMetricError"
    q = write(tmp_path, "q.json", {"coeffs": [0.1]})
    code, out = call(capsys, "frobenius", "--q", q, "--alpha", "2")
    assert code == 1 and "does not match" in out["error"]


def test_argparse_errors_are_json():
    code, out = run("frobenius", "--q", "q.json", "--alpha", "-1")
    assert code == 2 and "error" in json.loads(out)
    code, out = run("nosuch")
    assert code == 2 and "error" in json.loads(out)


def test_repeat_runs_are_byte_identical():
    args = ("build", "--omega", str(CORPUS / "omega_mixed.json"))
    a, b = run(*args), run(*args)
    assert a[0] == 0 and a == b
    args = ("analyze", "--map", str(CORPUS / "map_cubic_generic.json"))
    assert run(*args) == run(*args)


def test_verify_passes_on_shipped_corpus():
    code, out = run("verify")
    report = json.loads(out)
    assert code == 0, report
    assert report["all_passed"] and len(report["properties"]) == 9


def test_verify_reports_failures(tmp_path):
    (tmp_path / "omega_bad.json").write_text(json.dumps(
        {"poles": [{"point": [0, 0], "residue": 1}, {"point": [1, 0], "residue": 1}]}))
    code, out = run("verify", "--corpus", str(tmp_path))
    assert code in (1, 2) and "error" in json.loads(out)
