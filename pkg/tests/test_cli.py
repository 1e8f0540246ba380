import pytest

import cli
from cli_components.args import parse_args
from services.import_service import read_csv

SMALL = "block_lengths = 40, 40\ndepth = 4\noverheads = 1.0:2.0:0.5\ntrials = 2\nseed = 4\n"
DEGREE_ONE = "K = 100\ndepth = 4\nomega = 1\ngamma = 1\noverheads = 1.0, 2.0\n"


def test_parse_args():
    args = parse_args(["-q", "de", "--config", "run.cfg", "--out", "de.csv", "--target", "0.01"])
    assert args["hasArgs"] and args["quiet"]
    assert args["operation"] == "de" and args["target"] == 0.01
    assert parse_args([])["hasArgs"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["simulate", "--config", "run.cfg"],
        ["optimize", "--omega", "omega.txt", "--dmax", "4", "--eps", "0.01"],
        ["optimize", "--omega", "omega.txt", "--mu", "9", "--dmax", "4", "--eps", "1.5"],
        ["optimize", "--omega", "omega.txt", "--mu", "9", "--dmax", "4", "--eps", "0.01", "--uep", "--q", "q.txt"],
        ["optimize", "--omega", "omega.txt", "--mu", "9", "--dmax", "4", "--eps", "0.01", "--grid", "1"],
        ["de", "--config", "run.cfg", "--out", "de.csv", "--target", "2"],
    ],
)
def test_usage_errors_exit_with_one(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 1
    assert "❌ Error:" in capsys.readouterr().err


def test_simulate_writes_csv(write_file, tmp_path):
    config = write_file("small.cfg", SMALL)
    out = tmp_path / "results" / "sim.csv"
    assert cli.main(["-q", "simulate", "--config", str(config), "--out", str(out), "--trials", "1"]) == 0
    result = read_csv(out)
    assert result.trials == 1 and result.K == 80
    assert result.scopes() == ["overall", "source:1", "source:2"]


def test_simulate_compare_reports_gap(write_file, tmp_path, capsys):
    config = write_file("small.cfg", SMALL.replace("2.0:0.5", "3.0:0.5"))
    out = tmp_path / "sim.csv"
    assert cli.main(["simulate", "--config", str(config), "--out", str(out), "--compare"]) == 0
    printed = capsys.readouterr().out
    assert "✅ Complete!" in printed
    assert ("Simulation vs. density evolution" in printed) or ("⚠️" in printed)


def test_de_with_target(write_file, tmp_path, capsys):
    config = write_file("degree_one.cfg", DEGREE_ONE)
    out = tmp_path / "de.csv"
    assert cli.main(["de", "--config", str(config), "--out", str(out), "--target", "0.1"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "epsilon_r,scope,P_fixed,iterations,converged"
    assert len(lines) == 3
    assert "overall: 2.30259" in capsys.readouterr().out


def test_optimize_prints_design(write_file, capsys):
    omega = write_file("omega.txt", "1:1\n")
    argv = ["optimize", "--omega", str(omega), "--mu", "5", "--dmax", "1", "--eps", "0.01", "--grid", "40"]
    assert cli.main(argv) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "1:1"


def test_optimize_sweep_table(write_file, capsys):
    omega = write_file("omega.txt", "1:1\n")
    argv = ["optimize", "--omega", str(omega), "--sweep-mu", "4:5:1", "--dmax", "1", "--eps", "0.01", "--grid", "20"]
    assert cli.main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "4\t-\tinfeasible"
    assert lines[1].startswith("5\t") and lines[1].endswith("\toptimal")


def test_missing_config_exits_with_two(tmp_path, capsys):
    argv = ["simulate", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path / "sim.csv")]
    assert cli.main(argv) == cli.CONFIG_EXIT_CODE
    assert "not found" in capsys.readouterr().err


def test_invalid_config_exits_with_two(write_file, tmp_path):
    config = write_file("bad.cfg", "K = 100\ndepth = 3\n")
    assert cli.main(["de", "--config", str(config), "--out", str(tmp_path / "de.csv")]) == cli.CONFIG_EXIT_CODE


def test_bound_without_windows_exits_with_two(write_file, tmp_path):
    config = write_file("plain.cfg", DEGREE_ONE)
    assert cli.main(["bound", "--config", str(config), "--out", str(tmp_path / "b.csv")]) == cli.CONFIG_EXIT_CODE


def test_bad_environment_exits_with_two(write_file, tmp_path, monkeypatch):
    monkeypatch.setenv("DLT_WORKERS", "many")
    config = write_file("degree_one.cfg", DEGREE_ONE)
    assert cli.main(["-q", "de", "--config", str(config), "--out", str(tmp_path / "de.csv")]) == cli.CONFIG_EXIT_CODE


def test_infeasible_design_exits_with_three(write_file, capsys):
    omega = write_file("omega.txt", "1:1\n")
    argv = ["optimize", "--omega", str(omega), "--mu", "4", "--dmax", "1", "--eps", "0.01", "--grid", "40"]
    assert cli.main(argv) == cli.RUNTIME_EXIT_CODE
    assert "❌ Error:" in capsys.readouterr().err


def test_cancelled_prompt(monkeypatch, capsys):
    def cancel():
        raise KeyboardInterrupt

    monkeypatch.setattr(cli, "prompt_operation", cancel)
    assert cli.main([]) == 1
    assert "Operation cancelled" in capsys.readouterr().out
