import csv
import io
import json

import numpy as np
import pytest

from klindex.cli import UsageError, main, parse_config, parse_grid


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_kernel_sweep():
    cfg = parse_config(["kernel", "--alpha", "0.5", "--tau", "0:3:7", "--x", "1"])
    assert cfg["alpha"] == 0.5
    np.testing.assert_allclose(cfg["tau"], np.linspace(0, 3, 7))
    np.testing.assert_array_equal(cfg["x"], [1.0])
    assert cfg["tol"] == 1e-10


@pytest.mark.parametrize("text,expect", [("2", [2.0]), ("0.5,1,2", [0.5, 1.0, 2.0]), ("0:1:3", [0, 0.5, 1])])
def test_parse_grid(text, expect):
    np.testing.assert_allclose(parse_grid(text), expect)


@pytest.mark.parametrize("text", ["1:0:3", "2,1", "a:b:c", "0:1:0", ""])
def test_parse_grid_rejects(text):
    with pytest.raises(UsageError):
        parse_grid(text)


def test_missing_alpha(capsys):
    code, out, err = _run(capsys, "kernel", "--tau", "1", "--x", "1")
    assert code == 2
    assert "--alpha" in err


def test_unknown_flag(capsys):
    assert _run(capsys, "kernel", "--alpha", "0", "--tau", "1", "--x", "1", "--bogus", "3")[0] == 2


def test_tolerance_range(capsys):
    assert _run(capsys, "kernel", "--alpha", "0", "--tau", "1", "--x", "1", "--tol", "1")[0] == 2


def test_file_then_flag(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"tol": 1e-8, "alpha": 0.25}))
    cfg = parse_config(["kernel", "--config", str(path), "--tau", "1", "--x", "1", "--tol", "1e-6"])
    assert cfg["tol"] == 1e-6
    assert cfg["alpha"] == 0.25


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"tolerance": 1e-8}))
    assert _run(capsys, "kernel", "--config", str(path), "--alpha", "0", "--tau", "1", "--x", "1")[0] == 2


def test_kernel_csv(capsys):
    code, out, _ = _run(capsys, "kernel", "--alpha", "1", "--tau", "0", "--x", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["value"]) == pytest.approx(np.pi / 2 * np.exp(-2), rel=1e-12)


def test_forward_json_deterministic(capsys):
    argv = ["forward", "--alpha", "0", "--tau", "0:2:3", "--function", "exp", "--format", "json", "--seed", "7"]
    code, out1, _ = _run(capsys, *argv)
    _, out2, _ = _run(capsys, *argv)
    assert code == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["schema_version"] == 1
    assert doc["metadata"]["seed"] == 7
    assert len(doc["rows"]) == 3


def test_forward_then_invert(tmp_path, capsys):
    F = tmp_path / "F.csv"
    assert main(["forward", "--alpha", "0.5", "--tau", "0:48:481", "--function", "moment",
                 "--output", str(F)]) == 0
    code, out, _ = _run(capsys, "invert", "--alpha", "0.5", "--x", "0.5,1,2", "--input", str(F))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    x = np.array([float(r["x"]) for r in rows])
    v = np.array([float(r["value"]) for r in rows])
    # moment(0.5) is the normalized three-zero exp_linear family
    from klindex.inversion import moment_matched_test_function
    np.testing.assert_allclose(v, moment_matched_test_function(0.5, "exp_linear", 3)(x), rtol=1e-3)


def test_bad_input_file(capsys):
    assert _run(capsys, "invert", "--alpha", "0.5", "--x", "1", "--input", "/nonexistent.csv")[0] == 2


def test_precondition_exit(capsys):
    code, _, err = _run(capsys, "forward", "--alpha", "1", "--tau", "0", "--function", "exp", "--route", "direct")
    assert code == 2
    assert "precondition" in err


def test_pde_residual_mode(capsys):
    code, out, _ = _run(capsys, "pde", "--n", "0", "--r", "0.8:1.2:21", "--theta", "0:0.4:21",
                        "--function", "gauss4", "--mode", "residual")
    assert code == 0
    vals = [abs(float(r["value"])) for r in csv.DictReader(io.StringIO(out))]
    assert max(vals) < 1e-3


def test_verify_properties(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "properties", "--seed", "3")
    assert code == 0
    assert "passed" in out.splitlines()[0]
