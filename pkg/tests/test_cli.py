"""
Tests for the CLI module.
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from degree0 import __version__
from degree0.cli import app, cli_main
from degree0.experiments import HOPF_COLUMNS, K3_COLUMNS, TORUS_COLUMNS


@pytest.fixture
def runner():
    """Create a CLI test runner."""
    return CliRunner()


@pytest.fixture
def mock_config():
    """Skip installing the JSON log handler."""
    with patch("degree0.cli.init_config") as mock_init:
        yield mock_init


@pytest.fixture
def mock_health_check():
    """Mock health check for testing."""
    with patch("degree0.cli.run_health_check") as mock_check:
        mock_check.return_value = (True, [])
        yield mock_check


@pytest.fixture
def cli(runner, mock_config, mock_health_check):
    """Invoke the app with configuration and health checks mocked."""
    def invoke(*args):
        return runner.invoke(app, list(args))
    return invoke


@pytest.fixture
def not_in_M_file(tmp_path):
    path = tmp_path / "riemann_outside.json"
    path.write_text(json.dumps({
        "radicands": [-1],
        "Z": [[{"-1": "2"}, {"-1": "1"}], [{"-1": "3"}, {"-1": "1"}]],
    }))
    return path


class TestCLIBasics:
    """Test basic CLI functionality."""

    def test_help_output(self, cli):
        """Test that --help lists the command groups."""
        result = cli("--help")
        assert result.exit_code == 0
        assert "classify" in result.stdout
        assert "verify-witness" in result.stdout
        assert "experiment" in result.stdout

    def test_version_flag(self, runner):
        """Test that --version shows the correct version."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert f"degree0 version {__version__}" in result.stdout

    def test_debug_flag(self, cli, mock_config):
        """Test that --debug is passed to configuration."""
        result = cli("--debug", "classify", "hopf", "--example", "diag35")
        assert result.exit_code == 0
        mock_config.assert_called_once_with(config_file=None, debug=True)

    def test_missing_config_file(self, cli):
        """Test that a missing --config file is rejected."""
        result = cli("--config", "does-not-exist.env", "classify", "hopf", "--example", "diag35")
        assert result.exit_code == 1
        assert "Config file not found" in result.output

    def test_health_check_failure(self, runner, mock_config):
        """Test that a failed health check stops the command."""
        with patch("degree0.cli.run_health_check", return_value=(False, ["Setting workers=0 outside [1, 256]"])):
            result = runner.invoke(app, ["classify", "hopf", "--example", "diag35"])
        assert result.exit_code == 1
        assert "Health check failed" in result.output
        assert "workers=0" in result.output

    def test_unsupported_config_suffix(self, cli, tmp_path):
        """Test that a --config file with an unknown suffix is rejected."""
        path = tmp_path / "settings.toml"
        path.write_text("workers = 2")
        result = cli("--config", str(path), "classify", "hopf", "--example", "diag35")
        assert result.exit_code == 1
        assert "Unsupported config file format" in result.output

    def test_entry_point_catches_unexpected_errors(self):
        """Test that the console entry point turns a crash into exit code 1."""
        with patch("degree0.cli.app", side_effect=RuntimeError("boom")):
            with pytest.raises(SystemExit) as exc:
                cli_main()
        assert exc.value.code == 1

    def test_console_script_targets_entry_point(self):
        """Test that the installed command goes through cli_main."""
        pyproject = (Path(__file__).parents[1] / "pyproject.toml").read_text()
        assert 'degree0 = "degree0.cli:cli_main"' in pyproject


class TestClassifyTorus:
    """Test the classify torus command."""

    def test_siegel(self, cli):
        result = cli("classify", "torus", "--example", "siegel")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["verdict"] == "Degree0Certified"
        assert report["r_kernel"]["basis"] == []
        assert report["admissible_witness"] is None

    def test_shafarevich(self, cli):
        result = cli("classify", "torus", "--example", "shafarevich")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["verdict"] == "Inconclusive01"
        assert report["admissible_witness"] == [0, 1, 0, 0, -1, 0]

    def test_text_format(self, cli):
        result = cli("classify", "torus", "--example", "shafarevich", "--format", "text")
        assert result.exit_code == 0
        assert "TORUS CLASSIFICATION" in result.stdout
        assert "Inconclusive01" in result.stdout

    def test_byte_identical_reruns(self, cli):
        first = cli("classify", "torus", "--example", "siegel")
        second = cli("classify", "torus", "--example", "siegel")
        assert first.stdout == second.stdout

    def test_input_file(self, cli, tmp_path):
        path = tmp_path / "riemann.json"
        path.write_text(json.dumps({
            "radicands": [-1],
            "Z": [[{"-1": "2"}, {"-1": "1"}], [{"-1": "3"}, {"-1": "3"}]],
        }))
        result = cli("classify", "torus", "-i", str(path))
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["verdict"] == "Degree2"
        assert report["s_membership"] == 3

    def test_transposed_convention(self, cli, tmp_path):
        path = tmp_path / "riemann.json"
        path.write_text(json.dumps({
            "radicands": [-1],
            "Z": [[{"-1": "2"}, {"-1": "3"}], [{"-1": "1"}, {"-1": "3"}]],
        }))
        result = cli("classify", "torus", "-i", str(path), "--convention", "transposed")
        assert json.loads(result.stdout)["verdict"] == "Degree2"

    def test_not_in_M_exits_2(self, cli, not_in_M_file):
        result = cli("classify", "torus", "-i", str(not_in_M_file))
        assert result.exit_code == 2
        assert "positive definite" in result.output

    def test_needs_one_source(self, cli):
        result = cli("classify", "torus")
        assert result.exit_code == 2
        assert "exactly one" in result.output

    def test_wrong_family_example(self, cli):
        result = cli("classify", "torus", "--example", "diag28")
        assert result.exit_code == 2

    def test_bad_radicand_exits_2(self, cli, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"radicands": [-1, 4], "Z": [[1, 0], [0, 1]]}))
        result = cli("classify", "torus", "-i", str(path))
        assert result.exit_code == 2

    def test_unexpected_error_exits_1(self, cli):
        with patch("degree0.torus.classify", side_effect=RuntimeError("boom")):
            result = cli("classify", "torus", "--example", "siegel")
        assert result.exit_code == 1
        assert "Unexpected error during torus classification" in result.output

    def test_output_file(self, cli, tmp_path):
        target = tmp_path / "reports" / "siegel.json"
        result = cli("classify", "torus", "--example", "siegel", "-o", str(target))
        assert result.exit_code == 0
        assert "Output written" in result.output
        assert json.loads(target.read_text())["verdict"] == "Degree0Certified"


class TestClassifyHopf:
    """Test the classify hopf command."""

    @pytest.mark.parametrize("example,hopf_class,verdict", [
        ("diag35", "M0", "Degree0"),
        ("diag28", "M0", "Degree1"),
        ("diag22", "M1", "Degree1"),
        ("jordan2", "M2", "Degree1"),
    ])
    def test_examples(self, cli, example, hopf_class, verdict):
        result = cli("classify", "hopf", "--example", example)
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["class"] == hopf_class
        assert report["verdict"] == verdict

    def test_dependence(self, cli):
        report = json.loads(cli("classify", "hopf", "--example", "diag28").stdout)
        assert report["dependence"] == [3, 1]
        assert report["dependence_complete"] is True
        assert report["witness_verified"] is True

    def test_height_bound_from_file(self, cli, tmp_path):
        path = tmp_path / "units.json"
        path.write_text(json.dumps({
            "radicands": [2, 3],
            "t": [[{"": "1", "2": "1"}, 0], [0, {"": "2", "3": "1"}]],
            "height_bound": 6,
        }))
        report = json.loads(cli("classify", "hopf", "-i", str(path)).stdout)
        assert report["verdict"] == "Degree0"
        assert report["bounded_caveat"] is True

    def test_not_in_moduli_exits_2(self, cli, tmp_path):
        path = tmp_path / "small.json"
        path.write_text(json.dumps({"radicands": [], "t": [["1/2", 0], [0, 3]]}))
        result = cli("classify", "hopf", "-i", str(path))
        assert result.exit_code == 2

    def test_singular_exits_2(self, cli, tmp_path):
        path = tmp_path / "singular.json"
        path.write_text(json.dumps({"radicands": [], "t": [[1, 2], [2, 4]]}))
        assert cli("classify", "hopf", "-i", str(path)).exit_code == 2

    def test_bad_bound(self, cli):
        assert cli("classify", "hopf", "--example", "diag35", "--bound", "0").exit_code == 2


class TestVerifyWitness:
    """Test the verify-witness command."""

    def test_dependent_diagonal(self, cli):
        result = cli("verify-witness", "hopf", "--example", "diag28")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["description"] == "z1^3/z2"
        assert report["verified"] is True

    def test_scalar(self, cli):
        report = json.loads(cli("verify-witness", "hopf", "--example", "diag22").stdout)
        assert report["description"] == "z1/z2"
        assert report["verified"] is True

    def test_jordan_block(self, cli):
        report = json.loads(cli("verify-witness", "hopf", "--example", "jordan2").stdout)
        assert report["class"] == "M2"
        assert report["witness"]["kind"] == "LinearQuotient"
        assert report["witness"]["c1"] == {"": "-26/3"}
        assert report["witness"]["c2"] == {"": "38/3"}

    def test_degree0_has_no_witness(self, cli):
        result = cli("verify-witness", "hopf", "--example", "diag35")
        assert result.exit_code == 2
        assert "no invariant function" in result.output


class TestClassifyK3:
    """Test the classify k3 command."""

    def test_certified(self, cli):
        result = cli("classify", "k3", "--example", "k3-toy-certified")
        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["verdict"] == "Degree0Certified"
        assert report["kernel_rank"] == 0
        assert report["form"] == {"dim": 4, "signature": [2, 2, 0], "is_k3": False}

    def test_line_bundles(self, cli):
        report = json.loads(cli("classify", "k3", "--example", "k3-toy-bundles").stdout)
        assert report["verdict"] == "HasLineBundles"
        assert report["kernel_rank"] == 2
        assert report["witness"] == [0, 1, 1, 0]

    def test_expect_k3_rejects_toy_form(self, cli):
        result = cli("classify", "k3", "--example", "k3-toy-certified", "--expect-k3")
        assert result.exit_code == 2
        assert "signature" in result.output

    def test_form_override_mismatch(self, cli):
        result = cli("classify", "k3", "--example", "k3-toy-certified", "--form", "k3")
        assert result.exit_code == 2

    def test_off_quadric_exits_2(self, cli, tmp_path):
        path = tmp_path / "off.json"
        path.write_text(json.dumps({"form": "preset:U+U", "radicands": [], "lambda": [1, 1, 0, 0]}))
        assert cli("classify", "k3", "-i", str(path)).exit_code == 2


class TestExperiments:
    """Test the experiment commands."""

    def test_torus_csv(self, cli):
        result = cli("experiment", "torus", "--radicands=-1,2", "--height", "3", "--count", "4", "--seed", "9")
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == ",".join(TORUS_COLUMNS)
        assert len([line for line in lines if not line.startswith("#")]) == 5
        assert "# total,4" in lines

    def test_byte_identical_reruns(self, cli):
        args = ("experiment", "hopf", "--count", "20", "--seed", "42", "--height", "9")
        assert cli(*args).stdout == cli(*args).stdout

    def test_workers_do_not_change_output(self, cli):
        args = ("experiment", "torus", "--radicands=-1,2", "--height", "3", "--count", "6", "--seed", "1")
        assert cli(*args, "--workers", "1").stdout == cli(*args, "--workers", "3").stdout

    def test_hopf_json(self, cli):
        result = cli("experiment", "hopf", "--count", "5", "--format", "json")
        assert result.exit_code == 0
        parsed = json.loads(result.stdout)
        assert len(parsed["rows"]) == 5
        assert set(parsed["rows"][0]) == set(HOPF_COLUMNS)
        assert parsed["summary"]["total"] == 5

    def test_k3_text(self, cli):
        result = cli("experiment", "k3", "--count", "3", "--height", "3", "--format", "text")
        assert result.exit_code == 0
        assert "K3 EXPERIMENT" in result.stdout
        for column in K3_COLUMNS:
            assert column in result.stdout

    def test_rational_control(self, cli):
        result = cli("experiment", "torus", "--radicands=-1", "--count", "5", "--format", "json")
        assert json.loads(result.stdout)["summary"]["degree0_certified"] == 0

    def test_output_file(self, cli, tmp_path):
        target = tmp_path / "k3.csv"
        result = cli("experiment", "k3", "--count", "2", "--height", "3", "-o", str(target))
        assert result.exit_code == 0
        assert target.read_text().startswith(",".join(K3_COLUMNS))

    def test_hopf_height_too_small(self, cli):
        result = cli("experiment", "hopf", "--height", "1", "--count", "2")
        assert result.exit_code == 2
        assert "--height >= 2" in result.output

    def test_unknown_k3_form(self, cli):
        result = cli("experiment", "k3", "--form", "D4", "--count", "2")
        assert result.exit_code == 2
        assert "Unknown lattice block" in result.output

    def test_real_torus_context(self, cli):
        assert cli("experiment", "torus", "--radicands", "2,3", "--count", "2").exit_code == 2

    def test_malformed_radicands(self, cli):
        assert cli("experiment", "torus", "--radicands", "a,b", "--count", "2").exit_code == 2

    def test_zero_count(self, cli):
        assert cli("experiment", "torus", "--count", "0").exit_code == 2
