import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from mimo_gdof.cli import alpha_grid, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_text(capsys):
    code, out, _ = run(capsys, "eval", "-K", "3", "-M", "1", "-N", "1", "-a", "0.5")
    assert code == 0
    assert out.splitlines()[0].split() == ["sum_gdof", "1.5"]
    assert "active_branch alpha<=1/2" in out


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "-K", "3", "-M", "2", "-N", "3", "-a", "0.7", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["sum_gdof"] == pytest.approx(3.9)
    assert doc["bounds"]["b1"] is None
    code, out, _ = run(capsys, "eval", "-K", "3", "-M", "3", "-N", "2", "-a", "2", "--format", "json")
    assert json.loads(out)["sum_gdof"] == pytest.approx(4)


def parse_curve(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema=1 ")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_curve_breakpoints(capsys):
    expected = {0.0: 3, 0.5: 1.5, 0.75: 1.5, 1.0: 1, 3.0: 3}
    code, out, _ = run(capsys, "curve", "-K", "3", "-M", "1", "-N", "1",
                       "--alpha-start", "0", "--alpha-stop", "3", "--alpha-step", "0.25")
    assert code == 0
    rows = parse_curve(out)
    assert len(rows) == 13
    got = {float(r["alpha"]): float(r["sum_gdof"]) for r in rows}
    for a, v in expected.items():
        assert got[a] == pytest.approx(v)
    assert rows[0]["b1+"] == "" and rows[0]["b1"] != ""


def test_curve_single_point_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "curve", "-K", "3", "-M", "2", "-N", "3",
                       "--alpha-start", "0.7", "--alpha-stop", "0.7", "--alpha-step", "0.1")
    rows = parse_curve(out)
    assert len(rows) == 1 and float(rows[0]["sum_gdof"]) == pytest.approx(3.9)
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "curve", "-K", "3", "-M", "2", "-N", "3", "--format", "json",
                     "--alpha-step", "0.5", "--out", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["schema"] == 1 and len(doc["rows"]) == 7


def test_curve_is_byte_deterministic(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"c{i}.csv"
        assert main(["curve", "-K", "4", "-M", "2", "-N", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_alpha_grid():
    g = alpha_grid(0, 3, 0.01)
    assert len(g) == 301 and g[-1] == 3.0 and g[70] == 0.7


def test_plan(capsys):
    code, out, _ = run(capsys, "plan", "-K", "3", "-M", "2", "-N", "3", "-a", "0.7")
    doc = json.loads(out)
    assert code == 0 and doc["validation"]["match"]
    code, out, _ = run(capsys, "plan", "-K", "2", "-M", "1", "-N", "3", "-a", "0.7")
    assert code == 0 and json.loads(out)["construction"].startswith("zero-forcing")


def test_check_mac(capsys, tmp_path):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"M1": 1, "M2": 1, "alpha": 0.5, "eta": [0, 0], "alpha_n": [0]}))
    tup = tmp_path / "d.json"
    tup.write_text(json.dumps({"d": [0.5, 0.5]}))
    code, out, _ = run(capsys, "check-mac", "--problem", str(prob), "--tuple", str(tup))
    doc = json.loads(out)
    assert code == 0 and doc["achievable"]
    assert doc["margins"]["2"] == pytest.approx(0)
    tup.write_text("[0.6, 0.5]")
    code, out, _ = run(capsys, "check-mac", "--problem", str(prob), "--tuple", str(tup))
    assert not json.loads(out)["achievable"]


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "M1": 1,\n  "M2": ,\n}')
    code, _, err = run(capsys, "check-mac", "--problem", str(bad), "--tuple", str(bad))
    assert code == 2
    assert f"{bad}:3:9" in err


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "eval", "-K", "1", "-M", "1", "-N", "1", "-a", "0.5")[0] == 1
    assert run(capsys, "eval", "-K", "3", "-M", "1", "-N", "1", "-a", "-1")[0] == 1
    with pytest.raises(SystemExit) as e:
        main(["eval", "-K", "x", "-M", "1", "-N", "1", "-a", "0.5"])
    assert e.value.code == 2
    assert run(capsys, "ais", "--config", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "curve", "-K", "3", "-M", "1", "-N", "1", "--alpha-step", "0")[0] == 1


def test_ais(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "siso_half.cfg").read_text())
    cfg.update(pbars=[4, 8, 16], trials=20)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "ais", "--config", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["coefficient_rhs"] == 0.5 and doc["partition_ok"]
    code, out2, _ = run(capsys, "ais", "--config", str(path))
    assert out == out2
    code, out3, _ = run(capsys, "ais", "--config", str(path), "--seed", "7")
    assert json.loads(out3)["seed"] == 7
    code, _, err = run(capsys, "ais", "--config", str(path), "--budget", "10")
    assert code == 3 and "budget" in err


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "mimo_gdof.cli", "eval", "-K", "3", "-M", "1",
                        "-N", "1", "-a", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and "sum_gdof      3.0" in r.stdout
