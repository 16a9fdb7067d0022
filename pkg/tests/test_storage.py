"""
Tests for the rule cache and report persistence.
"""
import math

import numpy as np
import pandas as pd

from dunklsb.models import (
    CheckRecord,
    ErrorRecord,
    ReportStatus,
    VerificationReport,
    export_csv,
    get_cache_dir,
    list_cached_rules,
    load_report,
    report_dataframe,
    save_report,
    set_cache_dir,
)
from dunklsb.models.storage import load_quadrature, quadrature_file_path, save_quadrature


def sample_report() -> VerificationReport:
    report = VerificationReport(suite="kernels")
    report.start()
    report.set_config("nodes", 40)
    report.add_record(CheckRecord(check_id="kernels.symmetry", params={"N": 1, "t": 1.0}, abs_err=1e-15, tol=1e-12))
    report.add_record(
        CheckRecord(check_id="kernels.gamma_factor", params={"N": 1, "t": 1.0}, abs_err=math.inf, rel_err=math.inf, tol=0.0)
    )
    report.add_record(ErrorRecord(message="kernels.gamma_factor raised OverflowError", error_type="OverflowError"))
    report.complete()
    return report


class TestQuadratureCache:
    """Tests for cached Gauss rules."""

    def test_default_location(self, mock_app_dir):
        """Test that the cache lives under the application directory."""
        assert get_cache_dir() == mock_app_dir / "quadrature"
        assert quadrature_file_path(0.5, 2.0, 10).name == "q_0.5_2_10.json"

    def test_redirect(self, tmp_path):
        """Test set_cache_dir and its reset."""
        target = tmp_path / "elsewhere"
        set_cache_dir(target)
        save_quadrature(1.0, 1.0, 2, np.array([-1.0, 1.0]), np.array([0.5, 0.5]))

        assert [p.name for p in list_cached_rules()] == ["q_1_1_2.json"]
        assert (target / "q_1_1_2.json").exists()
        set_cache_dir(None)
        assert list_cached_rules() == []

    def test_full_precision(self):
        """Test that nodes survive the round trip bit for bit."""
        nodes = np.array([-np.pi, 1.0 / 3.0, np.pi])
        weights = np.array([0.1, 0.8, 0.1])
        save_quadrature(1.0, 1.0, 3, nodes, weights)
        loaded_nodes, loaded_weights = load_quadrature(1.0, 1.0, 3)

        assert np.array_equal(loaded_nodes, nodes)
        assert np.array_equal(loaded_weights, weights)

    def test_missing(self):
        """Test that a missing rule loads as None."""
        assert load_quadrature(1.0, 1.0, 7) is None

    def test_corrupt_file(self, capsys):
        """Test that a corrupt file is reported and ignored."""
        quadrature_file_path(1.0, 1.0, 5).write_text("{not json")

        assert load_quadrature(1.0, 1.0, 5) is None
        assert "Ignoring cached rule q_1_1_5.json" in capsys.readouterr().err

    def test_wrong_size(self):
        """Test that a file with the wrong number of nodes is ignored."""
        path = save_quadrature(1.0, 1.0, 5, np.zeros(4), np.zeros(4))
        assert path.exists()
        assert load_quadrature(1.0, 1.0, 5) is None


class TestReportStorage:
    """Tests for saving, loading and exporting reports."""

    def test_round_trip(self, tmp_path):
        """Test that a saved report loads with the same records and status."""
        report = sample_report()
        path = tmp_path / "out" / "report.json"
        save_report(report, path)
        loaded = load_report(path)

        assert loaded.suite == "kernels"
        assert loaded.status == ReportStatus.ERROR
        assert loaded.config == {"nodes": 40}
        assert loaded.summary == report.summary
        assert math.isinf(loaded.checks[1].abs_err)
        assert '"schema": "dunklsb-report/1"' in path.read_text()

    def test_dataframe(self):
        """Test one row per check record."""
        frame = report_dataframe(sample_report())

        assert list(frame["check_id"]) == ["kernels.symmetry", "kernels.gamma_factor"]
        assert list(frame["pass"]) == [True, False]
        assert "param.t" in frame.columns

    def test_csv(self, tmp_path):
        """Test the CSV export."""
        path = export_csv(sample_report(), tmp_path / "report.csv")
        frame = pd.read_csv(path)

        assert len(frame) == 2
        assert frame["tol"].iloc[0] == 1e-12
