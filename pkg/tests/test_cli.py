import json

import numpy as np
import pytest

from gnqkz import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_yb_example(capsys):
    code, out, _ = run(capsys, "verify-yb", "--alpha", "1", "--beta", "2", "--samples", "100", "--seed", "7")
    assert code == 0
    d = json.loads(out)
    assert d["schema_version"] == cli.SCHEMA_VERSION
    assert d["seed"] == 7 and d["config"]["seed"] == 7
    assert max(d["results"]["summary"]["max_residual"].values()) <= 1e-10


def test_mass_gap_csv_example(capsys):
    code, out, _ = run(capsys, "mass-gap", "--alpha", "1", "--beta", "2", "--Lambda", "2000", "--m0", "4",
                       "--t-grid", "0:10:0.1", "--format", "csv")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "t,g,m"
    m = np.array([float(l.split(",")[2]) for l in lines[1:]])
    assert len(m) == 101
    assert np.all(np.diff(m) < 0)
    assert '"Lambda": 2000.0' in out   # config is embedded


def test_solve_bethe_example(capsys):
    code, out, _ = run(capsys, "solve-bethe", "--NL", "1", "--NR", "1", "--M", "1", "--g", "0.5")
    assert code == 0
    assert json.loads(out)["results"]["roots"] == [0.0]


def test_identical_runs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.run(["verify-transport", "--NL", "2", "--NR", "1", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"NL": 1, "NR": 1, "M": 1, "g": 0.3, "seed": 5}))
    code, out, _ = run(capsys, "solve-bethe", "--config", str(cfg), "--g", "0.5")
    d = json.loads(out)
    assert code == 0
    assert d["config"]["g"] == 0.5 and d["seed"] == 5


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "solve-bethe", "--config", str(cfg))
    assert code == cli.EXIT_USAGE
    assert json.loads(err)["status"] == "usage_error"


@pytest.mark.parametrize("argv", [
    ["nope"],
    [],
    ["verify-yb", "--tol", "-1"],
    ["solve-bethe", "--M", "3", "--g", "0.5"],
    ["solve-bethe", "--M", "1"],
    ["mass-gap", "--t-grid", "5:1:0.1"],
    ["classify-regime"],
])
def test_usage_errors(capsys, argv):
    code = cli.run(argv)
    capsys.readouterr()
    assert code == cli.EXIT_USAGE


def test_tolerance_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify-yb", "--samples", "5", "--tol", "1e-20")
    assert code == cli.EXIT_FAIL
    d = json.loads(out)
    assert d["status"] == "fail" and d["results"]["failures"]


def test_numeric_error_exit_code(capsys):
    code, out, _ = run(capsys, "solve-bethe", "--NL", "2", "--NR", "2", "--M", "2", "--g", "0.5", "--tol", "1e-300")
    assert code == cli.EXIT_NUMERIC
    assert json.loads(out)["error"]["type"] == "ConvergenceError"


def test_other_commands_pass(capsys):
    for argv in (["qkz-check"], ["yang-yang"], ["verify-eigen", "--NL", "2", "--NR", "2", "--g", "0.5"],
                 ["density", "--N", "60", "--inv-g", "2"], ["rg-flow"], ["r-classical"],
                 ["classify-regime", "--t", "2.198806796638283", "--expect", "adiabatic"]):
        assert cli.run(argv) == 0, argv
    capsys.readouterr()


def test_grid_parser():
    assert cli.parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_grid("1,2.5") == [1.0, 2.5]
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0:1")


def test_jsonable_handles_special_values():
    d = cli.jsonable({"c": 1 + 2j, "x": np.float64("nan"), "a": np.arange(2), "b": np.bool_(True)})
    assert d == {"c": [1.0, 2.0], "x": "nan", "a": [0, 1], "b": True}
    json.dumps(d, allow_nan=False)
