"""
Tests for the command-line interface.
"""
import json
import sys
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from dunklsb.cli import cli
from dunklsb.cli.cli import EXIT_NUMERICAL, parse_complex
from dunklsb.errors import RankDeficiencyError
from dunklsb.models import ReportStatus, load_report, save_report
from dunklsb.models.report import CheckRecord, VerificationReport

# ``dunklsb.cli.cli`` is shadowed by the re-exported Group; patch the module directly.
cli_module = sys.modules["dunklsb.cli.cli"]


@pytest.fixture
def runner(mock_app_dir):
    with patch.object(cli_module, "get_app_dir", return_value=mock_app_dir):
        yield CliRunner()


KERNEL_ARGS = ["verify", "--suite", "kernels", "--k", "0", "--t", "1", "--nodes", "40"]


class TestParseComplex:
    """Tests for complex number parsing."""

    def test_forms(self):
        """Test the accepted spellings."""
        assert parse_complex("1+2i") == 1 + 2j
        assert parse_complex("-0.5i") == -0.5j
        assert parse_complex(" 3 ") == 3.0
        assert parse_complex("1-1I") == 1 - 1j

    def test_invalid(self):
        """Test that garbage is rejected."""
        with pytest.raises(ValueError):
            parse_complex("")
        with pytest.raises(ValueError):
            parse_complex("one")


class TestVerify:
    """Tests for the verify command."""

    def test_passing_run(self, runner, tmp_path):
        """Test a passing run writing JSON and CSV."""
        out = tmp_path / "kernels.json"
        result = runner.invoke(cli, KERNEL_ARGS + ["--out", str(out), "--csv"])

        assert result.exit_code == 0, result.output
        assert "checks passed" in result.output
        assert load_report(out).status == ReportStatus.PASSED
        assert out.with_suffix(".csv").exists()

    def test_config_file(self, runner, tmp_path):
        """Test that options override values from the config file."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"suite": "kernels", "k": [0.0], "t": [1.0], "nodes": 10}))
        out = tmp_path / "report.json"
        result = runner.invoke(cli, ["verify", "--config", str(config), "--nodes", "40", "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert load_report(out).config["nodes"] == 40

    def test_invalid_multiplicity(self, runner):
        """Test that an invalid configuration exits with status 2."""
        result = runner.invoke(cli, ["verify", "--suite", "kernels", "--k", "-1"])
        assert result.exit_code == 2
        assert "Invalid configuration" in result.output

    def test_bad_config_file(self, runner, tmp_path):
        """Test that an unreadable config file exits with status 2."""
        config = tmp_path / "config.json"
        config.write_text("{suite: kernels")
        result = runner.invoke(cli, ["verify", "--config", str(config)])
        assert result.exit_code == 2

    def test_failing_run(self, runner):
        """Test that failed checks give exit status 1 and are listed."""
        result = runner.invoke(cli, KERNEL_ARGS + ["--tol-scale", "1e-300"])
        assert result.exit_code == 1
        assert "FAIL" in result.output


class TestTools:
    """Tests for the kernel, quad, polar, show and dir commands."""

    def test_kernel(self, runner):
        """Test E_0(2, 3) = e^6."""
        result = runner.invoke(cli, ["kernel", "--k", "0", "--z", "2", "--w", "3"])
        assert result.exit_code == 0, result.output
        assert "403.4287934927" in result.output

    def test_kernel_bad_point(self, runner):
        """Test that a malformed point is a usage error."""
        result = runner.invoke(cli, ["kernel", "--k", "0", "--z", "two", "--w", "3"])
        assert result.exit_code == 2

    def test_kernel_dimension(self, runner):
        """Test that mismatched dimensions are reported."""
        result = runner.invoke(cli, ["kernel", "--k", "0,1", "--z", "2", "--w", "3"])
        assert result.exit_code == 2

    def test_quad(self, runner, tmp_path):
        """Test building, printing and caching a rule."""
        cache = tmp_path / "rules"
        result = runner.invoke(cli, ["quad", "--k", "1", "--nodes", "4", "--print", "--cache-dir", str(cache)])

        assert result.exit_code == 0, result.output
        assert "Nodes and weights" in result.output
        assert (cache / "q_1_1_4.json").exists()

    def test_polar(self, runner, tmp_path):
        """Test a small restriction principle run."""
        out = tmp_path / "polar.json"
        result = runner.invoke(
            cli, ["polar", "--k", "1", "--basis", "2", "--pad", "8", "--nodes", "40", "--degree", "20", "--out", str(out)]
        )

        assert result.exit_code == 0, result.output
        assert "leading_column_err" in result.output
        data = json.loads(out.read_text())
        assert data["max_deg"] == 2
        assert len(data["singular_values"]) == 3

    def test_kernel_series_failure(self, runner):
        """Test that a diverging kernel series exits with the numerical code."""
        result = runner.invoke(cli, ["kernel", "--k", "1", "--z", "40", "--w", "40"])

        assert result.exit_code == EXIT_NUMERICAL
        assert "Numerical failure" in result.output
        assert "did not converge" in result.output

    def test_kernel_overflow(self, runner):
        """Test that an overflowing gamma factor exits with the numerical code."""
        with patch.object(cli_module, "dunkl_kernel", side_effect=OverflowError("gamma factor overflows")):
            result = runner.invoke(cli, ["kernel", "--k", "1", "--z", "1", "--w", "1"])

        assert result.exit_code == EXIT_NUMERICAL
        assert "gamma factor overflows" in result.output

    def test_polar_rank_deficient(self, runner):
        """Test that a rank-deficient operator matrix is reported, not raised."""
        error = RankDeficiencyError("operator matrix is rank deficient", sigma_min=0.0)
        with patch.object(cli_module, "verify_restriction_principle", side_effect=error):
            result = runner.invoke(cli, ["polar", "--k", "1", "--basis", "2", "--pad", "8", "--nodes", "40"])

        assert result.exit_code == EXIT_NUMERICAL
        assert "rank deficient" in result.output

    def test_show(self, runner, tmp_path):
        """Test rendering a saved report."""
        report = VerificationReport(suite="kernels")
        report.add_record(CheckRecord(check_id="kernels.symmetry", abs_err=0.0, tol=1e-12))
        report.complete()
        path = tmp_path / "report.json"
        save_report(report, path)

        result = runner.invoke(cli, ["show", str(path)])
        assert result.exit_code == 0, result.output
        assert "kernels.symmetry" in result.output
        assert "1/1" in result.output

    def test_show_not_a_report(self, runner, tmp_path):
        """Test that a file which is not a report exits with status 2."""
        path = tmp_path / "other.json"
        path.write_text("[1, 2, 3]")
        result = runner.invoke(cli, ["show", str(path)])
        assert result.exit_code == 2

    def test_dir(self, runner, mock_app_dir):
        """Test listing the application directory and cache."""
        result = runner.invoke(cli, ["dir"])
        assert result.exit_code == 0, result.output
        assert "Quadrature cache" in result.output
        assert "No cached rules yet" in result.output

        runner.invoke(cli, ["quad", "--k", "0.5", "--nodes", "6"])
        result = runner.invoke(cli, ["dir"])
        assert "q_0.5_1_6.json" in result.output
