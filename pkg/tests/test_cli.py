import csv
import json

import pytest
from hypothesis import given, strategies as st

from nonlocal_fronts.cli import csv_text, fmt, parse_ladder, run
from nonlocal_fronts.errors import ParameterError

MONO = ["solve-monotone", "--d", "0.16", "--sigma", "0.2", "--c", "3", "--xmin", "-20", "--xmax", "20",
        "--h", "0.02", "--tol", "1e-9"]


def run_json(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_equilibria(capsys):
    code, out = run_json(["equilibria", "--d", "0.16"], capsys)
    assert code == 0
    assert out["a"] == pytest.approx(0.2) and out["A"] == pytest.approx(0.8)
    assert out["validation"]["passed"] and out["config"]["d"] == 0.16


def test_equilibria_outside_proven_range_is_marked(capsys):
    code, out = run_json(["equilibria", "--d", "0.23"], capsys)
    assert code == 0 and out["outside_theorem_range"] and not out["theoretical_guarantee"]
    assert "warning" in out


@pytest.mark.parametrize("argv", [
    ["equilibria", "--d", "0.16", "--bogus", "1"],
    ["equilibria", "--d", "0.3"],
    ["nosuch"],
    ["c-star", "--d", "0.16", "--sigma-ladder", "1:0.5:0.1"],
    ["solve-monotone", "--d", "0.16", "--sigma", "0.2", "--c", "1.0"],
    ["solve-monotone", "--d", "0.16", "--sigma", "0.2", "--c", "3", "--h", "-1"],
    ["solve-bvp", "--d", "0.16", "--d0", "0.2", "--sigma", "0.1"],
    ["solve-bvp", "--d", "0.16", "--d0", "0.1", "--sigma", "0.1", "--h", "0.08"],
    ["sweep-sigma", "--d", "0.16", "--d0", "0.1", "--sigma-ladder", ""],
])
def test_invalid_input_exits_2(argv, capsys):
    assert run(argv) == 2


def test_unwritable_output_directory(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["equilibria", "--d", "0.1", "--out", str(blocker / "sub")]) == 2


def test_c_star_ladder_is_nondecreasing(tmp_path, capsys):
    code, out = run_json(["c-star", "--kernel", "gaussian", "--d", "0.16", "--sigma-ladder", "0.1:2:0.1",
                          "--out", str(tmp_path)], capsys)
    assert code == 0 and out["nondecreasing"]
    rows = list(csv.DictReader(open(tmp_path / "c_star.csv")))
    assert len(rows) == 20 and list(rows[0]) == ["sigma", "c_star", "lambda1", "lambda2", "eps1", "eps2"]
    cs = [float(r["c_star"]) for r in rows]
    assert all(b >= a - 1e-8 for a, b in zip(cs, cs[1:]))


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# model\nd = 0.1\nsigma = 0.3\nkernel = gaussian\nc = 1.0\n")
    code, out = run_json(["dispersion", "--config", str(cfg), "--c", "2.0"], capsys)
    assert code == 0
    assert out["config"]["d"] == 0.1 and out["config"]["kernel"] == "gaussian" and out["c"] == 2.0
    cfg.write_text("d = 0.1\nunknown_key = 3\n")
    assert run(["dispersion", "--config", str(cfg), "--c", "2.0", "--sigma", "0.1"]) == 2


def test_monotone_run_is_deterministic_and_verifiable(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(MONO + ["--out", str(a)]) == 0
    assert run(MONO + ["--out", str(b)]) == 0
    capsys.readouterr()
    for name in ("run.json", "profile.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    summary = json.loads((a / "run.json").read_text())
    for key in ("c", "left_limit", "right_limit", "residual_sup", "iterations", "b", "alpha", "xi_minus",
                "lambda1", "lambda2", "config", "validation", "bound_report"):
        assert key in summary
    header = (a / "profile.csv").read_text().splitlines()[0]
    assert header == "xi,omega,residual"
    code, out = run_json(["verify", "--in", str(a / "run.json")], capsys)
    assert code == 0 and out["reproduced"] and out["profile_identical"]


def test_verify_detects_tampering(tmp_path, capsys):
    assert run(MONO + ["--out", str(tmp_path)]) == 0
    capsys.readouterr()
    path = tmp_path / "run.json"
    data = json.loads(path.read_text())
    data["bound_report"][1]["value"] = 123.0
    path.write_text(json.dumps(data))
    code, out = run_json(["verify", "--in", str(path)], capsys)
    assert code == 1 and not out["reproduced"]


def test_nonconvergence_exits_1_with_json(tmp_path, capsys):
    code, out = run_json(MONO + ["--max-iter", "2", "--out", str(tmp_path)], capsys)
    assert code == 1 and out["converged"] is False
    assert (tmp_path / "run.json").exists()


def test_sweep_records_failed_cells(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("WAVEFRONT_WORKERS", "1")
    code, out = run_json(["sweep-sigma", "--d", "0.16", "--d0", "0.1", "--sigma-ladder", "0.2,0.01",
                          "--h", "0.01", "--eps-ladder", "1e-2", "--L-ladder", "20,40",
                          "--out", str(tmp_path)], capsys)
    assert code == 1
    rows = list(csv.DictReader(open(tmp_path / "sweep.csv")))
    assert rows[0]["right_limit_class"] != "failed" and rows[1]["right_limit_class"] == "failed"
    assert 0.2 < float(rows[0]["c_star_semi"]) < 0.4
    cell = json.loads((tmp_path / "cell_sigma_0.01.json").read_text())
    assert cell["status"] == "failed" and "ResolutionError" in cell["error"]


def test_bad_worker_env(monkeypatch, capsys):
    monkeypatch.setenv("WAVEFRONT_WORKERS", "many")
    assert run(["sweep-sigma", "--d", "0.16", "--d0", "0.1", "--sigma-ladder", "0.2"]) == 2


def test_local_oracle(capsys):
    code, out = run_json(["local-oracle", "--d", "0.16"], capsys)
    assert code == 0
    assert out["c_0A_exact"] == pytest.approx(0.282842712474619, abs=1e-14)
    assert out["c_aA_exact"] == pytest.approx(2 ** -0.5, abs=1e-15)


def test_parse_ladder():
    assert parse_ladder("0.1:0.5:0.1") == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert parse_ladder("1:0:-0.5") == [1.0, 0.5, 0.0]
    assert parse_ladder("0.2, 0.1,1e-3") == [0.2, 0.1, 1e-3]
    for bad in ("", "1:2", "1:0:0.1", "1:2:0"):
        with pytest.raises(ParameterError):
            parse_ladder(bad)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_numbers_round_trip(x):
    assert float(fmt(x)) == x


def test_csv_text_layout():
    assert csv_text(["a", "b"], [[1.0, 2.0], [True, "x"]]) == "a,b\n1,true\n2,x\n"
