import json

import pytest
from click.testing import CliRunner

from rank1lab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_geometry_json(runner):
    result = runner.invoke(main, ["geometry", "--family", "utv1", "--j", "5"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["rows"][0]["h"] == "720"
    assert payload["version"]
    assert payload["config"]["stages"]["r"] == 2


def test_geometry_csv_with_extras(runner):
    result = runner.invoke(main, [
        "geometry", "--family", "toy", "--j", "1..4",
        "--measure-sum", "--star-check", "--format", "csv",
    ])
    assert result.exit_code == 0
    assert "j,h,level_width" in result.output
    assert "4,15,1/8" in result.output
    assert "condition_star" in result.output


def test_family_spec_with_arguments(runner):
    result = runner.invoke(main, ["geometry", "--family", "thm2(2)", "--j", "2"])
    assert json.loads(result.output)["rows"][0]["h"] == "9"
    result = runner.invoke(main, ["geometry", "--family", "scaled(2)", "--j", "3"])
    assert json.loads(result.output)["rows"][0]["h"] == "48"


def test_bad_family_is_usage_error(runner):
    result = runner.invoke(main, ["geometry", "--family", "chacon", "--j", "2"])
    assert result.exit_code == 2


def test_construction_config_file(runner, tmp_path):
    config = tmp_path / "construction.json"
    config.write_text(json.dumps({
        "h1": 1,
        "base_width": "1/1",
        "stages": {"r": 2, "spacers": ["zero", {"rule": "j_times_h"}]},
    }))
    result = runner.invoke(main, ["geometry", "--config", str(config), "--j", "2"])
    assert result.exit_code == 0
    assert json.loads(result.output)["rows"][0]["h"] == "3"


def test_family_and_config_are_exclusive(runner, tmp_path):
    config = tmp_path / "c.json"
    config.write_text("{}")
    result = runner.invoke(main, [
        "geometry", "--family", "toy", "--config", str(config), "--j", "2",
    ])
    assert result.exit_code == 2


def test_measure_exact_and_set_sugar(runner):
    result = runner.invoke(main, [
        "measure", "--family", "toy", "--set", "E1", "--n", "3",
    ])
    assert result.exit_code == 0
    row = json.loads(result.output)["rows"][0]
    assert (row["lo"], row["hi"], row["exact"]) == ("5/8", "5/8", True)


def test_measure_textual_set_and_shift_list(runner):
    result = runner.invoke(main, [
        "measure", "--family", "toy",
        "--set", "stage=3; levels=0,1,3,4", "--set-b", "T^1E3", "--n", "-2..2",
    ])
    assert result.exit_code == 0
    assert len(json.loads(result.output)["rows"]) == 5


def test_measure_inconclusive_exit_code(runner):
    result = runner.invoke(main, [
        "measure", "--family", "toy", "--set", "E1", "--n", "15",
        "--max-stage", "6",
    ])
    assert result.exit_code == 3
    assert json.loads(result.output)["status"] == "INCONCLUSIVE"


def test_env_cap_is_honored(runner, monkeypatch):
    monkeypatch.setenv("RANK1_MAX_STAGE", "6")
    result = runner.invoke(main, [
        "measure", "--family", "toy", "--set", "E1", "--n", "15",
    ])
    assert result.exit_code == 3


def test_oracle_command_and_refusal(runner):
    result = runner.invoke(main, [
        "oracle", "--family", "toy", "--set", "E1", "--n", "3", "--stage", "4",
    ])
    assert result.exit_code == 0
    row = json.loads(result.output)["rows"][0]
    assert row["value"] == "5/8" and row["fully_defined"] is True
    refusal = runner.invoke(main, [
        "oracle", "--family", "toy", "--set", "E1", "--n", "7", "--stage", "3",
    ])
    assert refusal.exit_code == 2


def test_limits_verify_pass_and_fail(runner):
    passing = runner.invoke(main, [
        "limits", "verify", "--family", "utv1",
        "--seq", "h_k", "--poly", "1/2*T^0", "--j", "3..8",
    ])
    assert passing.exit_code == 0
    failing = runner.invoke(main, [
        "limits", "verify", "--family", "utv1",
        "--seq", "h_k", "--poly", "1/4*T^0", "--j", "3..5",
    ])
    assert failing.exit_code == 1


def test_limits_verify_custom_pairs(runner):
    result = runner.invoke(main, [
        "limits", "verify", "--family", "utv1",
        "--seq", "h_k + 1", "--poly", "1/2*T^1", "--j", "3..6",
        "--pair", "E2|T^1E2", "--pair", "T^1E2|T^3E2",
    ])
    assert result.exit_code == 0


def test_limits_scan_dead_zone(runner):
    result = runner.invoke(main, [
        "limits", "scan", "--family", "utv1", "--j", "5", "--format", "csv",
    ])
    assert result.exit_code == 0
    assert "dead_zone_exact_zero=true" in result.output


def test_limits_eq4(runner):
    result = runner.invoke(main, [
        "limits", "eq4", "--big-n", "2", "--n", "2", "--p", "1",
    ])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["stages"] == [3, 6]
    assert payload["status"] == "PASS"


def test_joinings_witness(runner):
    result = runner.invoke(main, [
        "joinings", "witness", "--family", "utv1", "--m", "1", "--j", "4..6",
    ])
    assert result.exit_code == 0
    rows = json.loads(result.output)["rows"]
    assert [row["j"] for row in rows] == [4, 5, 6]
    assert all(row["margin_lo"] == "0" for row in rows)


def test_products_scan_with_ratio(runner):
    result = runner.invoke(main, [
        "products", "scan", "--family", "scaled(2)", "--right-family", "utv1",
        "--m", "1", "--n", "1", "--set", "E2",
        "--k-lo", "1", "--k-hi", "8", "--samples", "4",
        "--ratio-target", "2/1",
    ])
    payload = json.loads(result.output)
    assert payload["ratio_check"][0]["ratio"] == "2/1"


def test_spectral_commands(runner):
    corr = runner.invoke(main, [
        "spectral", "corr", "--family", "utv1", "--n", "0..7",
        "--h-stages", "3..4", "--format", "csv",
    ])
    assert corr.exit_code == 0
    assert "24,1/2" in corr.output and "120,1/2" in corr.output
    density = runner.invoke(main, [
        "spectral", "density", "--family", "utv1", "--n", "0..24",
        "--order", "25", "--grid", "16",
    ])
    assert density.exit_code == 0
    assert len(json.loads(density.output)["rows"]) == 16
    suspend = runner.invoke(main, [
        "spectral", "suspend", "--family", "utv1", "--k", "24", "--format", "csv",
    ])
    assert suspend.exit_code == 0
    assert "0.377540668798" in suspend.output


def test_acceptance_single_criterion(runner):
    result = runner.invoke(main, ["acceptance", "--only", "2"])
    assert result.exit_code == 0
    assert "PASS criterion-2 halving" in result.output


def test_acceptance_known_defect_marker(runner):
    result = runner.invoke(main, ["acceptance", "--only", "6"])
    assert result.exit_code == 1
    assert "FAIL criterion-6" in result.output
    assert "[known-defect]" in result.output


def test_run_config_dispatch(runner, tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({
        "experiment": "limits",
        "construction": {"family": "utv1"},
        "params": {"seq": "h_k", "poly": "1/2*T^0", "j": "3..6"},
    }))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 0
    assert json.loads(result.output)["status"] == "PASS"


def test_run_config_rejects_unknown_keys(runner, tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"experiment": "geometry", "bogus": 1}))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 2
    config.write_text(json.dumps({
        "experiment": "geometry",
        "construction": {"family": "toy"},
        "params": {"j": "2", "bogus": True},
    }))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 2


def test_run_config_unknown_experiment(runner, tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({"experiment": "teleport"}))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 2


def test_run_spectral_op(runner, tmp_path):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({
        "experiment": "spectral",
        "construction": {"family": "utv1"},
        "params": {"op": "corr", "set": "E2", "n": "0..6"},
        "format": "csv",
    }))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 0
    assert "6,1/2" in result.output


def test_out_file_written_complete(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(main, [
        "geometry", "--family", "utv1", "--j", "3..5", "--out", str(out),
    ])
    assert result.exit_code == 0
    assert json.loads(out.read_text())["rows"][2]["h"] == "720"


def test_no_file_on_usage_error(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(main, [
        "measure", "--family", "toy", "--set", "stage=9; shape=odd",
        "--n", "1", "--out", str(out),
    ])
    assert result.exit_code == 2
    assert not out.exists()


def test_reports_are_deterministic(runner):
    args = [
        "limits", "verify", "--family", "utv1",
        "--seq", "h_k+h_{k-1}", "--poly", "1/4*T^0", "--j", "4..7",
    ]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.output == second.output
