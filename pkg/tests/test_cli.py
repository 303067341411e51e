import json

import numpy as np
import pytest

from skewgen import formats
from skewgen.cli import run
from skewgen.sampling import sample_bounded_rank_skew_poly, trial_rng


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_generic_pencil(capsys):
    code, out, _ = call(capsys, "generic-pencil", "10", "3")
    assert code == 0 and json.loads(out) == {"H": [], "K": [], "M": [1, 1, 1, 0]}
    code, out, _ = call(capsys, "generic-pencil", "10", "3", "--format", "text")
    assert out.strip() == "M_0 + M_1 + M_1 + M_1"


def test_generic_poly(capsys):
    code, out, _ = call(capsys, "generic-poly", "4", "1", "3")
    assert code == 0 and json.loads(out)["right"] == [1, 2]


def test_codim(capsys, tmp_path):
    assert call(capsys, "codim", "pencil", "6", "2")[1].strip() == "4"
    assert call(capsys, "codim", "poly", "4", "1", "3")[1].strip() == str((4 - 2 - 1) * (16 - 2) // 2)
    f = tmp_path / "s.json"
    f.write_text('{"M": [1, 1, 1, 0]}')
    assert call(capsys, "codim", "sum", str(f))[1].strip() == "21"
    assert call(capsys, "codim", "pencil", "6")[0] == 2
    assert call(capsys, "codim", "pencil", "6", "3")[0] == 2


def test_closure_check_exit_codes(capsys, tmp_path):
    W, Q = tmp_path / "W.json", tmp_path / "Q.json"
    W.write_text('{"M": [1, 0]}')
    Q.write_text('{"M": [0, 0, 0, 0]}')
    code, out, _ = call(capsys, "closure-check", str(W), str(Q))
    cert = json.loads(out)
    assert code == 0 and cert["dominated"] and [s["rule"] for s in cert["steps"]] == [6, 6, 3, 4]
    code, out, _ = call(capsys, "closure-check", str(Q), str(W))
    assert code == 1 and json.loads(out)["dominated"] is False


def test_closure_check_general_kcf(capsys, tmp_path):
    t, s = tmp_path / "t.json", tmp_path / "s.json"
    t.write_text('{"L": [1, 1], "LT": [1, 1]}')
    s.write_text('{"E": [{"label": "mu", "k": 1}, {"label": "mu", "k": 1}, '
                 '{"label": "mu", "k": 1}, {"label": "mu", "k": 1}], "L": [0, 0], "LT": [0, 0]}')
    code, out, _ = call(capsys, "closure-check", str(t), str(s), "--format", "text")
    assert code == 0 and "dominated in 4 step(s)" in out
    code, _, err = call(capsys, "closure-check", str(t), str(s), "--depth-cap", "1")
    assert code == 1


def test_closure_check_mixed_forms_is_usage_error(capsys, tmp_path):
    t, s = tmp_path / "t.json", tmp_path / "s.json"
    t.write_text('{"L": [1], "LT": [1]}')
    s.write_text('{"M": [0, 0, 0]}')
    assert call(capsys, "closure-check", str(t), str(s))[0] == 2


def test_malformed_json_is_exit_2_with_position(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"M": [1, ')
    code, _, err = call(capsys, "codim", "sum", str(f))
    assert code == 2 and "bad.json:1:" in err


def test_enumerate_and_dag(capsys):
    code, out, _ = call(capsys, "enumerate", "4", "2", "--labels", "1")
    assert code == 0 and len(json.loads(out)) == 4
    code, out, _ = call(capsys, "strata-dag", "4", "2", "--labels", "1")
    assert code == 0 and out.startswith("digraph") and out.count("->") == 4
    code, out, _ = call(capsys, "strata-dag", "4", "2", "--labels", "1", "--format", "json")
    assert len(json.loads(out)["edges"]) == 4
    assert call(capsys, "enumerate", "4", "2", "--format", "dot")[0] == 2


def _poly_file(tmp_path, m=4, r=1, d=3, seed=0):
    P = sample_bounded_rank_skew_poly(m, r, d, trial_rng(seed, 0))
    f = tmp_path / "p.json"
    f.write_text(formats.dumps(formats.matpoly_to_json(P)))
    return f, P


def test_linearize_and_analyze(capsys, tmp_path):
    f, P = _poly_file(tmp_path)
    code, out, _ = call(capsys, "linearize", str(f))
    lin = json.loads(out)
    assert code == 0 and lin["d"] == 1 and lin["m"] == 12
    g = tmp_path / "g.json"
    g.write_text(out)
    code, out, _ = call(capsys, "analyze", str(g))
    rec = json.loads(out)
    assert code == 0 and rec["right"] == [2, 3] and rec["normal_rank"] == 2 + 4 * 2 and rec["audit"]
    code, out, _ = call(capsys, "analyze", str(f), "--format", "text")
    assert "right minimal indices [1, 2]" in out


def test_linearize_even_grade_is_rejected(capsys, tmp_path):
    Z = np.zeros((2, 2))
    f = tmp_path / "even.json"
    f.write_text(formats.dumps(formats.matpoly_to_json(formats.MatPoly((Z, Z, Z)))))
    code, _, err = call(capsys, "linearize", str(f))
    assert code == 2 and "even grade" in err


def test_analyze_tolerance_inconsistency_exit_1(capsys, tmp_path, monkeypatch):
    from skewgen import cli, numeric

    def boom(p, tol):
        raise numeric.ToleranceInconsistency("forced", [numeric.RankDecision(1, 2.0, 0.1, "C_0")])

    monkeypatch.setattr(cli, "recover", boom)
    f, _ = _poly_file(tmp_path)
    code, out, err = call(capsys, "analyze", str(f))
    assert code == 1 and json.loads(out)["audit"][0]["what"] == "C_0"
    assert "tolerance inconsistency" in err


def test_experiment_is_reproducible(capsys):
    a = call(capsys, "experiment", "poly", "4", "1", "3", "--trials", "5", "--seed", "9")
    b = call(capsys, "experiment", "poly", "4", "1", "3", "--trials", "5", "--seed", "9")
    assert a[0] == 0 and a[1] == b[1]
    assert json.loads(a[1])["seed"] == 9
    code, out, _ = call(capsys, "experiment", "linearization", "3", "1", "5", "--trials", "3")
    assert code == 0 and json.loads(out)["roundtrip_failures"] == 0
    assert call(capsys, "experiment", "pencil", "5")[0] == 2


def test_experiment_mismatch_exit_1(capsys):
    code, out, _ = call(capsys, "experiment", "pencil", "5", "2", "--trials", "3", "--tol", "0.9")
    assert code == 1 and json.loads(out)["matches"] < 3


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("SKEWGEN_SEED", "9")
    monkeypatch.setenv("SKEWGEN_TRIALS", "2")
    code, out, _ = call(capsys, "experiment", "pencil", "5", "2")
    d = json.loads(out)
    assert d["seed"] == 9 and d["trials"] == 2
    code, out, _ = call(capsys, "experiment", "pencil", "5", "2", "--seed", "1")
    assert json.loads(out)["seed"] == 1
    monkeypatch.setenv("SKEWGEN_FORMAT", "text")
    assert call(capsys, "generic-pencil", "5", "2")[1].strip() == "M_2"
    monkeypatch.setenv("SKEWGEN_TOL", "nope")
    assert call(capsys, "generic-pencil", "5", "2")[0] == 2


def test_flags_before_subcommand(capsys):
    code, out, _ = call(capsys, "--seed", "5", "--trials", "2", "experiment", "pencil", "5", "2")
    d = json.loads(out)
    assert d["seed"] == 5 and d["trials"] == 2


def test_out_flag(capsys, tmp_path):
    f = tmp_path / "o.json"
    code, out, _ = call(capsys, "generic-pencil", "6", "2", "--out", str(f))
    assert code == 0 and out == "" and json.loads(f.read_text())["M"] == [1, 1]


def test_block_and_realize(capsys, tmp_path):
    code, out, _ = call(capsys, "block", "H", "1", "2")
    d = json.loads(out)
    assert code == 0 and d["m"] == 2 and d["d"] == 1
    assert d["coeffs"][1] == [[[0.0, 0.0], [1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]]
    assert call(capsys, "block", "H", "1")[0] == 2
    assert call(capsys, "block", "M", "1", "3")[0] == 2
    code, out, _ = call(capsys, "block", "L", "2")
    assert code == 0 and json.loads(out)["n"] == 3
    f = tmp_path / "s.json"
    f.write_text('{"H": [{"label": "mu", "h": 1}]}')
    code, _, err = call(capsys, "realize", str(f))
    assert code == 2 and "unrealizable symbolic eigenvalue" in err
    f.write_text('{"H": [{"re": 2, "im": 0, "h": 1}], "M": [0]}')
    code, out, _ = call(capsys, "realize", str(f))
    assert code == 0 and json.loads(out)["m"] == 3


def test_usage_errors(capsys):
    assert call(capsys, "nope")[0] == 2
    assert call(capsys)[0] == 2
    assert call(capsys, "generic-pencil", "x", "1")[0] == 2
    assert call(capsys, "--help")[0] == 0


def test_verify_subset(capsys):
    code, out, err = call(capsys, "verify", "--only", "2", "3", "--format", "text")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2 and all(" PASS " in line for line in lines)
