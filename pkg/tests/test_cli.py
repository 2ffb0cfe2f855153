import json
import subprocess
import sys

import pytest

from fock_partition import cli, states


def run(argv, capsys):
    status = cli.main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def test_partition_bs_csv(capsys):
    status, out, _ = run(["partition", "bs", "--sigma", "0.5", "--terms", "10", "--levels", "1", "--format", "csv"],
                         capsys)
    assert status == 0
    lines = out.split("\n")
    assert lines[0] == "terms_used,level,partial_sum,residual"
    assert lines[-1] == "" and "\r" not in out
    assert len(lines) == 12
    assert float(lines[10].split(",")[3]) == pytest.approx(2.0**-10, abs=1e-15)


def test_partition_json(capsys):
    status, out, _ = run(["partition", "nbs", "--gamma", "0.5", "--terms", "120", "--levels", "20"], capsys)
    assert status == 0
    data = json.loads(out)
    assert data["family"] == "nbs" and data["gamma"] == 0.5
    assert data["max_residual"] < 1e-10
    assert len(data["rows"]) == 120 * 20


def test_state_examples(capsys):
    status, out, _ = run(["state", "binomial", "--n", "2", "--sigma", "0.3"], capsys)
    assert status == 0
    data = json.loads(out)
    assert data["probs"] == pytest.approx([0.49, 0.42, 0.09], abs=1e-15)
    assert data["mean_photon"] == pytest.approx(0.6)

    status, out, _ = run(["state", "thermal", "--gamma", "0.5", "--format", "csv"], capsys)
    assert status == 0 and out.startswith("level,probability\n0,0.5\n")


def test_channel_number_state(capsys):
    status, out, _ = run(["channel", "--state", "number", "--m", "2", "--kt", "0.17834"], capsys)
    assert status == 0
    data = json.loads(out)
    assert data["binomial_match"]["n"] == 2
    sigma = data["survival"]
    target = states.binomial_state(2, sigma).probs
    assert data["output"]["probs"] == pytest.approx(list(target), abs=1e-12)


@pytest.mark.parametrize("argv", [
    [],
    ["verify", "bogus"],
    ["state", "squeezed"],
    ["state", "binomial", "--n", "2", "--sigma", "1.5"],
    ["state", "binomial", "--n", "2"],
    ["partition", "bs", "--sigma", "0.5", "--terms", "5", "--levels", "10"],
    ["channel", "--state", "number", "--m", "2", "--kt", "-1"],
    ["verify", "specfun", "--tol", "-1"],
    ["verify", "specfun", "--grids", "/nonexistent/grid.json"],
])
def test_usage_errors_exit_2(argv, capsys):
    status, out, err = run(argv, capsys)
    assert status == 2
    assert out == "" and err


def test_verify_suite_passes(capsys):
    status, out, _ = run(["verify", "channel"], capsys)
    assert status == 0
    assert out.rstrip().endswith("channel: PASS")


def test_verify_tight_tolerance_fails(capsys):
    status, out, _ = run(["verify", "partition", "--tol", "1e-30"], capsys)
    assert status == 1
    assert "partition: FAIL" in out


def test_verify_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("FOCK_PARTITION_TOL", "1e-30")
    assert run(["verify", "partition"], capsys)[0] == 1
    monkeypatch.setenv("FOCK_PARTITION_TOL", "not-a-number")
    assert run(["verify", "partition"], capsys)[0] == 2


def test_corrupted_sign_fails_verify(monkeypatch, capsys):
    monkeypatch.setattr(states, "NBS_EXPONENT_SIGN", +1)
    status, out, _ = run(["verify", "ordering", "--format", "json"], capsys)
    assert status == 1
    data = json.loads(out)
    bad = {c["identity"] for c in data["checks"] if c["status"] == "FAIL"}
    assert bad == {"nbs_normal_ordered"}


def test_verify_csv_and_json_shapes(capsys):
    status, out, _ = run(["verify", "specfun", "--format", "csv"], capsys)
    assert status == 0
    assert out.split("\n")[0] == "suite,identity,parameters,residual,tol,status"
    status, out, _ = run(["verify", "specfun", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["passed"] is True and all(c["status"] == "PASS" for c in data["checks"])


def test_custom_grid_file(tmp_path, capsys):
    grid = {"version": 1, "suites": {"specfun": [
        {"check": "laguerre_three_way", "scale": 1.0, "grid": {"n": [3], "x": [1.0]}}]}}
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(grid))
    status, out, _ = run(["verify", "specfun", "--grids", str(path), "--format", "json"], capsys)
    assert status == 0
    assert len(json.loads(out)["checks"]) == 1


def test_output_file_is_byte_stable(tmp_path, capsys):
    args = ["partition", "nbs", "--gamma", "0.3", "--terms", "30", "--levels", "5", "--format", "csv"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--output", str(first)]) == 0
    assert cli.main(args + ["--output", str(second)]) == 0
    assert capsys.readouterr().out == ""
    assert first.read_bytes() == second.read_bytes()
    assert b"\r" not in first.read_bytes()


def test_json_output_is_byte_stable(capsys):
    args = ["state", "negbinomial", "--s", "2", "--gamma", "0.4"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b
    assert json.loads(a)["tail_mass"] < 1e-12


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fock_partition", "state", "number", "--m", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["probs"] == [0.0, 1.0]
