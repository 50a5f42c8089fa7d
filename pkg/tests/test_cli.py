"""Command-line interface: exit codes, output files, stdout shapes."""

import json

import pytest

from evosurf.suite.cli import main


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "evosurf" in capsys.readouterr().out


def test_list_enumerates_catalog(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for token in ("unit_sphere", "torus", "rigid_rotation", "full_4x",
                  "tangential_voigt", "quadrature-plane-unit-square"):
        assert token in out


def test_verify_subset_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["verify", "--only", "quadrature-", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert all(c["pass"] for c in doc["checks"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert any(line.startswith("pass") for line in lines)


def test_verify_unknown_config_key_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("mystery_knob = 4\n")
    assert main(["verify", "--config", str(bad)]) == 2
    assert "mystery_knob" in capsys.readouterr().err


def test_verify_sabotage_flag_fails_and_exits_1(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--sabotage", "drop_tensor_transpose",
                 "--only", "ambient-tensor-divergence",
                 "--output", str(out)])
    assert code == 1
    doc = json.loads(out.read_text())
    assert any(not c["pass"] for c in doc["checks"])


def test_residual_command(capsys):
    assert main(["residual", "--system", "tangential_split",
                 "--state", "rest", "--points", "20"]) == 0
    out = capsys.readouterr().out
    assert "momentum" in out and "max |r|" in out


def test_residual_rejects_unknown_state(capsys):
    # unknown catalog names are configuration errors → exit code 2
    assert main(["residual", "--system", "full_4x",
                 "--state", "warp_drive"]) == 2
    assert "warp_drive" in capsys.readouterr().err


def test_converge_command(capsys):
    assert main(["converge", "--op", "gradient", "--points", "30"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("step,max_error")
    assert "fitted_slope=" in out


def test_report_from_saved_input(tmp_path, capsys):
    src = tmp_path / "in.json"
    assert main(["verify", "--only", "quadrature-plane",
                 "--output", str(src)]) == 0
    capsys.readouterr()
    assert main(["report", "--format", "csv", "--input", str(src)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "id,anchor,max_residual,tol,pass,slope"
    assert main(["report", "--format", "json", "--input", str(src)]) == 0
    assert json.loads(capsys.readouterr().out)["meta"]["seed"] == 2026
