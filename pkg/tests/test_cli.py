import json
import math
import os

import numpy as np
import pytest

from ncdist.cli import main


def write_state(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_report_number_state(tmp_path, capsys):
    path = write_state(tmp_path, "one.json", {"kind": "number", "ns": [1]})
    code, out, err = run_cli(capsys, "report", path)
    assert code == 0 and err == ""
    rep = json.loads(out)
    assert rep["exact"] == pytest.approx(1.0 - math.exp(-1.0), abs=1e-10)
    assert rep["best_lower"] <= rep["best_upper"] + 1e-8
    assert list(rep) == sorted(rep)
    assert {"state_id", "lowers", "uppers", "exact"} <= set(rep)


def test_report_cat_has_open_interval(tmp_path, capsys):
    path = write_state(tmp_path, "cat.json", {"kind": "cat", "parity": "even", "beta": 2.0})
    code, out, _ = run_cli(capsys, "report", path)
    assert code == 0
    rep = json.loads(out)
    assert rep["exact"] is None
    assert rep["best_lower"] < rep["best_upper"]


def test_report_coherent_is_classical(tmp_path, capsys):
    path = write_state(tmp_path, "coh.json", {"kind": "coherent", "alpha": [[0.7, -0.2]]})
    code, out, _ = run_cli(capsys, "report", path)
    assert code == 0
    rep = json.loads(out)
    assert rep["best_upper"] < 1e-9
    assert rep["exact"] is not None and rep["exact"] < 1e-9


def test_report_out_flag_writes_file(tmp_path, capsys):
    path = write_state(tmp_path, "one.json", {"kind": "number", "ns": [2]})
    target = tmp_path / "rep.json"
    code, out, _ = run_cli(capsys, "report", path, "--out", str(target))
    assert code == 0
    rep = json.loads(target.read_text())
    assert rep["exact"] == pytest.approx(1.0 - 2.0 * math.exp(-2.0), abs=1e-10)


def test_missing_file_is_schema_error(capsys):
    code, _, err = run_cli(capsys, "report", "/no/such/state.json")
    assert code == 2
    assert err.startswith("error:")


def test_invalid_json_is_schema_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run_cli(capsys, "report", str(path))
    assert code == 2 and "error:" in err


def test_unknown_kind_is_schema_error(tmp_path, capsys):
    path = write_state(tmp_path, "odd.json", {"kind": "squeezed", "r": 1.0})
    code, _, err = run_cli(capsys, "report", str(path))
    assert code == 2 and "/kind" in err


def test_small_cutoff_exits_three(tmp_path, capsys):
    path = write_state(tmp_path, "hot.json", {"kind": "coherent", "alpha": [[5.0, 0.0]]})
    code, _, err = run_cli(capsys, "report", str(path), "--trunc", "4")
    assert code == 3
    assert "cutoff" in err or "trunc" in err.lower()


def test_figure_fig3(tmp_path, capsys):
    out = tmp_path / "f3.csv"
    code, stdout, _ = run_cli(capsys, "figure", "fig3", "--out", str(out))
    assert code == 0
    assert str(out) in stdout
    lines = out.read_text().splitlines()
    assert lines[0].startswith("eta,lb_1,ub_1")
    assert len(lines) == 102
    assert os.path.exists(str(out) + ".plot.py")
    body = np.genfromtxt(str(out), delimiter=",", skip_header=1)
    for n in range(1, 5):
        assert np.all(body[:, 2 * n - 1] <= body[:, 2 * n] + 1e-8)


def test_figure_repeat_is_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli(capsys, "figure", "fig1", "--steps", "4", "--out", str(a))[0] == 0
    assert run_cli(capsys, "figure", "fig1", "--steps", "4", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_qsup_number_state(tmp_path, capsys):
    path = write_state(tmp_path, "two.json", {"kind": "number", "ns": [2]})
    code, out, _ = run_cli(capsys, "qsup", path, "--trunc", "16")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(0.27067056647322557, abs=1e-7)
    assert payload["converged"] is True
    # the optimum of a number state sits on a whole ring of amplitudes
    assert payload["ties"] is True
    top = payload["argmax"][0]
    assert len(top) == 1
    assert math.hypot(*top[0]) == pytest.approx(math.sqrt(2.0), abs=1e-6)


def test_verify_only_filter(capsys):
    code, out, _ = run_cli(capsys, "verify", "--only", "eigen")
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert lines and all(ln.startswith("[PASS]") for ln in lines)
    assert "checks passed" in out


def test_verify_unknown_filter(capsys):
    code, _, err = run_cli(capsys, "verify", "--only", "nonesuch")
    assert code == 2
    assert "nonesuch" in err
