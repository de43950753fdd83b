import json
import math

import pytest

from curvcone.cli import EXIT_INVALID, EXIT_OK, EXIT_VIOLATION, run
from curvcone.io import kahler_to_json, operator_to_json, operator_from_json
from curvcone.kahler import e_operator
from curvcone.curvature import random_curvature


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _strip_wall(text):
    data = json.loads(text)
    data.pop("wall_ms", None)
    return data


def test_epsilon(capsys):
    code, out, _ = _run(capsys, "epsilon", "--n", "11")
    assert code == EXIT_OK and out.strip() == "0.09090909090909091"
    code, out, _ = _run(capsys, "epsilon", "--n", "10", "--exact")
    assert out.strip() == "225/2254"
    code, out, _ = _run(capsys, "epsilon", "--n", "3")
    assert code == EXIT_INVALID


def test_usage_errors(capsys):
    assert _run(capsys, "frobnicate")[0] == EXIT_INVALID
    assert _run(capsys, "scan", "--n", "6", "--bogus")[0] == EXIT_INVALID
    assert _run(capsys, "scan", "--n", "6", "--seed", "-1")[0] == EXIT_INVALID
    assert _run(capsys, "scan", "--n", "6", "--a", "2.0", "--samples", "5")[0] == EXIT_INVALID
    assert _run(capsys, "verify", "--name", "nope")[0] == EXIT_INVALID
    assert _run(capsys, "inclusions", "--n", "6", "--samples", "2", "--format", "csv")[0] == EXIT_INVALID


def test_scan_writes_report(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = _run(capsys, "scan", "--n", "6", "--a", "theorem", "--samples", "500",
                      "--seed", "42", "--out", str(out))
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["violations"] == 0 and data["schema"] == "curvcone/1"
    assert data["cone"]["param"] == pytest.approx(1.5 - 36 * 5 / (2 * 16 * 49), abs=1e-15)


def test_scan_violation_exit(capsys):
    # a negative tolerance turns every sample into a violation
    code, _, _ = _run(capsys, "scan", "--n", "5", "--samples", "20", "--no-ascent",
                      "--tolerance", "-1")
    assert code == EXIT_VIOLATION


def test_scan_jobs_and_config(capsys, tmp_path, monkeypatch):
    base = ["scan", "--n", "7", "--samples", "600", "--seed", "9", "--no-ascent"]
    ref = _strip_wall(_run(capsys, *base)[1])
    assert _strip_wall(_run(capsys, *base, "--jobs", "2")[1]) == ref
    monkeypatch.setenv("CURVCONE_JOBS", "3")
    assert _strip_wall(_run(capsys, *base)[1]) == ref
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# scan job\ncommand = scan\nn = 7\nsamples = 600\nseed = 1\nno_ascent = true\n")
    # the flag overrides the file's seed
    assert _strip_wall(_run(capsys, "scan", "--config", str(cfg), "--seed", "9")[1]) == ref
    cfg.write_text("colour = blue\n")
    assert _run(capsys, "scan", "--config", str(cfg))[0] == EXIT_INVALID
    cfg.write_text("command = lift\n")
    assert _run(capsys, "scan", "--config", str(cfg))[0] == EXIT_INVALID


def test_lift_cp2(capsys, tmp_path):
    src = tmp_path / "cp2.json"
    src.write_text(json.dumps(kahler_to_json(e_operator(2))))
    out = tmp_path / "r.json"
    code, _, _ = _run(capsys, "lift", "--input", str(src), "--tau", "auto", "--lambda0", "3.0",
                      "--out", str(out))
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["n"] == 5 and data["tau"] == pytest.approx(math.sqrt(2))
    R = operator_from_json(data)
    assert R.n == 5
    assert _run(capsys, "lift", "--input", str(src), "--tau", "-1")[0] == EXIT_INVALID


def test_decompose_and_q(capsys, tmp_path):
    src = tmp_path / "r.json"
    src.write_text(json.dumps(operator_to_json(random_curvature(5, seed=0))))
    code, out, _ = _run(capsys, "decompose", "--input", str(src))
    assert code == EXIT_OK
    norms = json.loads(out)["norms"]
    assert [norms[k] for k in ("I", "Ric0", "W")] == pytest.approx([1.0, 1.0, 1.0])
    code, out, _ = _run(capsys, "q", "--input", str(src))
    assert code == EXIT_OK and json.loads(out)["n"] == 5
    src.write_text("[1, 2]")
    assert _run(capsys, "q", "--input", str(src))[0] == EXIT_INVALID


def test_flow_csv(capsys):
    code, out, _ = _run(capsys, "flow", "--n", "4", "--c", "0.5", "--t-end", "0.1", "--a", "theorem")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].endswith("slack_omega_a") and len(lines) > 2


def test_verify_csv_and_json(capsys):
    code, out, _ = _run(capsys, "verify", "--name", "bw_ric", "--trials", "5", "--dims", "4-5",
                        "--format", "csv")
    assert code == EXIT_OK and out.startswith("name,kind")
    code, out, _ = _run(capsys, "verify", "--name", "qw_cubic", "--trials", "20", "--dims", "4,6")
    assert code == EXIT_OK and json.loads(out)["passed"] is True


def test_inclusions(capsys):
    code, out, _ = _run(capsys, "inclusions", "--n", "6", "--samples", "10")
    assert code == EXIT_OK and json.loads(out)["asserted"] is False


def test_pinch_modes(capsys, tmp_path):
    code, out, _ = _run(capsys, "pinch", "--m", "2", "--trials", "20", "--eps", "0.5")
    assert code == EXIT_OK and json.loads(out)["counterexamples"] == []
    src = tmp_path / "k.json"
    src.write_text(json.dumps(kahler_to_json(e_operator(2))))
    code, out, _ = _run(capsys, "pinch", "--input", str(src))
    assert code == EXIT_OK and json.loads(out)["points"][0]["holds"]
    assert _run(capsys, "pinch", "--input", str(src), "--a", "9")[0] == EXIT_INVALID
