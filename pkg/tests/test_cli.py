import sys

import pytest
from click.testing import CliRunner

from cli import main as cli_main
from cli.commands import analyze as analyze_module
from cli.commands import validate as validate_module
from cli.main import cli
from extensions import configure_logging
from services.errors import QuadratureError
from services.validation import CheckResult


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def restore_logging():
    yield
    # the CLI binds its log handler to the runner's stderr
    configure_logging("WARNING", False)


def csv_lines(output):
    lines = output.splitlines()
    start = next(i for i, line in enumerate(lines) if line.startswith("# metadata"))
    return lines[start:]


class TestConfigCommands:
    def test_init_then_show(self, runner, tmp_path):
        path = tmp_path / "fdpower.conf"
        result = runner.invoke(cli, ["config", "init", str(path)])
        assert result.exit_code == 0
        assert path.exists()

        result = runner.invoke(cli, ["--config", str(path), "config", "show", "--yaml"])
        assert result.exit_code == 0
        assert "lambda_bs:" in result.output

    def test_show_sizes_trials_from_target(self, runner):
        result = runner.invoke(cli, ["--set", "target_ci_halfwidth=0.01", "config", "show"])
        assert result.exit_code == 0, result.output
        assert "Run Configuration" in result.output
        assert "9220" in result.output

    def test_init_keeps_existing_file(self, runner, tmp_path):
        path = tmp_path / "fdpower.conf"
        path.write_text("alpha = 3\n")
        result = runner.invoke(cli, ["config", "init", str(path)])
        assert result.exit_code == 0
        assert "already exists" in result.output
        assert path.read_text() == "alpha = 3\n"

    def test_unknown_key(self, runner):
        result = runner.invoke(cli, ["--set", "gamma=1", "config", "show"])
        assert result.exit_code == 1
        assert "Unknown configuration key" in result.output

    def test_path_loss_exponent_out_of_range(self, runner):
        result = runner.invoke(cli, ["--set", "alpha=2", "config", "show"])
        assert result.exit_code == 1

    def test_malformed_override(self, runner):
        result = runner.invoke(cli, ["--set", "alpha", "config", "show"])
        assert result.exit_code == 1


class TestAnalyze:
    def test_csv_to_stdout(self, runner):
        result = runner.invoke(cli, ["analyze", "--engine", "lower", "--engine", "upper", "--hd", "--output", "-"])
        assert result.exit_code == 0, result.output
        lines = csv_lines(result.output)
        assert lines[0].startswith("# metadata config_hash=")
        assert lines[1].startswith("scheme,engine,p_ul,p_dl")
        assert [line.split(",")[:2] for line in lines[2:5]] == [
            ["cpc", "bound_lower"], ["cpc", "bound_upper"], ["hd", "exact"]
        ]

    def test_table_output(self, runner):
        result = runner.invoke(cli, ["analyze", "--scheme", "upc"])
        assert result.exit_code == 0, result.output

    def test_missing_fpc_parameter(self, runner):
        result = runner.invoke(cli, ["analyze", "--scheme", "fpc"])
        assert result.exit_code == 1
        assert "p_bar" in result.output

    def test_convergence_failure_exit_code(self, runner, monkeypatch):
        def fail(*args, **kwargs):
            raise QuadratureError("integrand misbehaved", 1.0, 1e-8)

        monkeypatch.setattr(analyze_module.analytic, "analytic_report", fail)
        result = runner.invoke(cli, ["analyze"])
        assert result.exit_code == 2

    def test_unknown_engine(self, runner):
        result = runner.invoke(cli, ["analyze", "--engine", "magic"])
        assert result.exit_code == 1


class TestSweep:
    ARGS = ["sweep", "--axis", "beta", "--min", "-120 dB", "--max", "-60 dB", "--points", "3", "--metric", "p_ul"]

    def test_identical_runs_identical_bytes(self, runner, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert runner.invoke(cli, self.ARGS + ["--output", str(first)]).exit_code == 0
        assert runner.invoke(cli, self.ARGS + ["--output", str(second)]).exit_code == 0
        assert first.read_bytes() == second.read_bytes()
        lines = first.read_text().splitlines()
        assert lines[1] == "beta,p_ul[cpc/bound_lower]"
        assert len(lines) == 5
        values = [float(line.split(",")[1]) for line in lines[2:]]
        assert values == sorted(values, reverse=True)

    def test_single_point(self, runner):
        result = runner.invoke(cli, ["sweep", "--axis", "p_max", "--min", "1 W", "--max", "2 W", "--points", "1"])
        assert result.exit_code == 0, result.output
        assert len(csv_lines(result.output)) == 3

    def test_link_distance_axis(self, runner):
        result = runner.invoke(
            cli,
            ["sweep", "--axis", "link_distance", "--min", "10 m", "--max", "1 km", "--points", "4",
             "--metric", "fd_rate", "--metric", "hd_rate"],
        )
        assert result.exit_code == 0, result.output
        assert csv_lines(result.output)[1] == "link_distance,fd_rate[cpc/bound_lower],hd_rate[cpc/bound_lower]"

    def test_report_metric_at_fixed_distance_rejected(self, runner):
        result = runner.invoke(
            cli, ["sweep", "--axis", "link_distance", "--min", "10", "--max", "100", "--metric", "p_ul"]
        )
        assert result.exit_code == 1

    def test_unknown_axis(self, runner):
        result = runner.invoke(cli, ["sweep", "--axis", "gamma", "--min", "1", "--max", "2"])
        assert result.exit_code == 1


class TestOptimize:
    def test_trace_csv(self, runner, tmp_path):
        trace = tmp_path / "trace.csv"
        result = runner.invoke(
            cli, ["optimize", "--scheme", "cpc", "--grid-points", "6", "--traffic", "2:1", "--output", str(trace)]
        )
        assert result.exit_code == 0, result.output
        lines = trace.read_text().splitlines()
        assert lines[1] == "p_max,value,rate_ul,rate_dl,stage"
        assert lines[2].endswith(",grid")

    def test_box_for_foreign_parameter(self, runner):
        result = runner.invoke(cli, ["optimize", "--scheme", "cpc", "--box", "xi=0:1"])
        assert result.exit_code == 1

    def test_bad_traffic(self, runner):
        result = runner.invoke(cli, ["optimize", "--traffic", "0:1"])
        assert result.exit_code == 1


class TestValidate:
    def test_failure_exit_code(self, runner, monkeypatch):
        monkeypatch.setattr(
            validate_module,
            "run_suites",
            lambda config, quick: [CheckResult(name="sandwich[cpc]", gap=1.0, tolerance=1e-4, passed=False)],
        )
        result = runner.invoke(cli, ["validate", "--quick"])
        assert result.exit_code == 3
        assert "sandwich[cpc]" in result.output

    def test_success(self, runner, monkeypatch):
        monkeypatch.setattr(
            validate_module,
            "run_suites",
            lambda config, quick: [CheckResult(name="hd_closed_form[theta_u]", gap=0.0, tolerance=1e-6, passed=True)],
        )
        result = runner.invoke(cli, ["validate"])
        assert result.exit_code == 0


class TestExperiment:
    def test_tightness_csv(self, runner):
        result = runner.invoke(
            cli, ["experiment", "tightness", "--s-min", "1e10", "--s-max", "1e10", "--points", "1"]
        )
        assert result.exit_code == 0, result.output
        lines = csv_lines(result.output)
        assert lines[1] == "family,s,lower,exact,upper,monte_carlo,ci_halfwidth"
        family, _, lower, exact, upper, _, _ = lines[2].split(",")
        assert family == "cpc"
        assert float(lower) - 1e-4 <= float(exact) <= float(upper) + 1e-4

    def test_si_requirement(self, runner):
        result = runner.invoke(cli, ["experiment", "si-requirement", "--target", "0 m"])
        assert result.exit_code == 0, result.output

    def test_calibration_rejects_simulation(self, runner):
        result = runner.invoke(cli, ["experiment", "operating-point", "--engine", "mc"])
        assert result.exit_code == 1


def test_usage_errors_exit_with_one(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["fdpower", "--no-such-option"])
    with pytest.raises(SystemExit) as info:
        cli_main.main()
    assert info.value.code == 1


def test_welcome(runner):
    result = runner.invoke(cli, [])
    assert result.exit_code == 0
    assert "analyze" in result.output
