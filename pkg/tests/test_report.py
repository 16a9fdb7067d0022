"""
Tests for the report model and the suite API.
"""
import math
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from dunklsb.api import SUITE_NAMES, SuiteConfig, checks, registered_checks, run_suite, verification
from dunklsb.core.polar import CERTIFICATE_PAD
from dunklsb.models import (
    CheckMode,
    CheckRecord,
    ErrorRecord,
    InfoRecord,
    ReportStatus,
    VerificationReport,
)


def stripped(report: VerificationReport):
    """Report contents without the runtimes, which vary between runs."""
    data = report.model_dump(mode="json")
    for record in data["records"]:
        record.pop("runtime_ms", None)
    return data


class TestCheckRecord:
    """Tests for the CheckRecord model."""

    def test_modes(self):
        """Test that the tolerance applies to the declared error."""
        assert CheckRecord(check_id="a", abs_err=1e-3, rel_err=1e-9, tol=1e-6, mode=CheckMode.REL).passed
        assert not CheckRecord(check_id="a", abs_err=1e-3, rel_err=1e-9, tol=1e-6, mode=CheckMode.ABS).passed
        assert CheckRecord(check_id="a", abs_err=1e-3, rel_err=1e-9, tol=1e-6).passed
        assert not CheckRecord(check_id="a", abs_err=1e-3, rel_err=1e-3, tol=1e-6).passed

    def test_non_finite_never_passes(self):
        """Test that an infinite error fails even with an infinite tolerance."""
        record = CheckRecord(check_id="a", abs_err=math.inf, rel_err=math.inf, tol=math.inf)
        assert not record.passed

    def test_message(self):
        """Test the default message."""
        record = CheckRecord(check_id="kernels.symmetry", abs_err=0.0, rel_err=0.0, tol=1e-12)
        assert record.message.startswith("kernels.symmetry: pass")


class TestVerificationReport:
    """Tests for the VerificationReport model."""

    def test_report_creation(self):
        """Test creating a report."""
        report = VerificationReport(suite="kernels")

        assert report.suite == "kernels"
        assert report.records == []
        assert report.summary.total == 0
        assert report.status == ReportStatus.RUNNING

    def test_summary_and_status(self):
        """Test counting checks and deriving the status."""
        report = VerificationReport()
        report.start()
        report.add_record(CheckRecord(check_id="a", abs_err=0.0, tol=1e-9))
        report.add_record(CheckRecord(check_id="b", abs_err=1.0, rel_err=1.0, tol=1e-9))
        report.complete()

        assert report.summary.total == 2
        assert report.summary.passed == 1
        assert report.summary.failed == 1
        assert [c.check_id for c in report.failures] == ["b"]
        assert report.status == ReportStatus.FAILED
        assert not report.all_passed

    def test_error_status(self):
        """Test that an error record marks the run as errored."""
        report = VerificationReport()
        report.add_record(ErrorRecord(message="boom", error_type="ValueError"))
        report.complete()
        assert report.status == ReportStatus.ERROR

    def test_config(self):
        """Test recording configuration values."""
        report = VerificationReport()
        report.set_config("nodes", 80)
        report.set_config("suite", "polar")
        assert report.config == {"nodes": 80, "suite": "polar"}

    def test_sort_records(self):
        """Test ordering by kind, check id and parameters."""
        report = VerificationReport()
        report.complete()
        report.add_record(InfoRecord(check_id="z"))
        report.add_record(CheckRecord(check_id="b", params={"t": 2.0}, tol=1.0))
        report.add_record(CheckRecord(check_id="b", params={"t": 1.0}, tol=1.0))
        report.add_record(CheckRecord(check_id="a", tol=1.0))
        report.start()
        report.sort_records()

        kinds = [r.kind.value for r in report.records]
        assert kinds == ["start", "check", "check", "check", "info", "end"]
        assert [(c.check_id, c.params.get("t")) for c in report.checks] == [
            ("a", None),
            ("b", 1.0),
            ("b", 2.0),
        ]

    def test_check_rows(self):
        """Test flattening check records for tables."""
        report = VerificationReport()
        report.add_record(CheckRecord(check_id="a", params={"k": [1.0], "t": 1.0}, abs_err=0.5, tol=1.0))
        rows = report.check_rows()

        assert rows[0]["check_id"] == "a"
        assert rows[0]["param.t"] == 1.0
        assert rows[0]["pass"] is True


class TestVerification:
    """Tests for the verification context manager."""

    def test_completes(self):
        """Test that a clean run ends with an end record."""
        with verification("kernels", {"nodes": 10}) as report:
            report.add_record(InfoRecord(message="hello"))

        assert report.status == ReportStatus.PASSED
        assert report.config == {"nodes": 10}
        assert report.records[0].kind.value == "start"
        assert report.records[-1].kind.value == "end"

    def test_error(self):
        """Test that an exception is recorded and re-raised."""
        with pytest.raises(RuntimeError):
            with verification("kernels") as report:
                raise RuntimeError("Test error")

        assert report.status == ReportStatus.ERROR
        assert report.errors[0].message == "Test error"


class TestSuiteConfig:
    """Tests for SuiteConfig validation and the parameter grid."""

    def test_defaults(self):
        """Test the default grid."""
        config = SuiteConfig()
        points = config.parameter_points()

        assert config.suites == list(SUITE_NAMES)
        assert len(points) == 15
        assert points[0].key == "k=(0),t=0.5"
        assert points[-1].key == "k=(0.5,1.5),t=2"

    def test_one_dimension(self):
        """Test that each k is its own point in one dimension."""
        config = SuiteConfig(suite="kernels", k=[0.0, 2.0], t=[1.0])
        assert [p.key for p in config.parameter_points()] == ["k=(0),t=1", "k=(2),t=1"]

    def test_higher_dimensions(self):
        """Test a multiplicity vector and a broadcast value."""
        vector = SuiteConfig(k=[0.5, 1.5], dims=[2], t=[1.0]).parameter_points()
        broadcast = SuiteConfig(k=[1.0], dims=[3], t=[1.0]).parameter_points()

        assert [p.k for p in vector] == [(0.5, 1.5)]
        assert [p.k for p in broadcast] == [(1.0, 1.0, 1.0)]

    @pytest.mark.parametrize(
        "values",
        [
            {"k": [-1.0]},
            {"t": [0.0]},
            {"k": [0.5, 1.5, 2.0], "dims": [2]},
            {"degree": 12, "basis": 10},
            {"suite": "everything"},
            {"nodes": 80, "extra": 1},
        ],
    )
    def test_invalid(self, values):
        """Test that invalid configurations are rejected."""
        with pytest.raises(ValidationError):
            SuiteConfig(**values)


class TestRunSuite:
    """Tests for run_suite."""

    @pytest.fixture
    def config(self):
        return SuiteConfig(suite="kernels", k=[0.0], t=[1.0], nodes=40)

    def test_registry(self):
        """Test that every suite has checks."""
        for suite in SUITE_NAMES:
            assert registered_checks(suite)
        assert "kernels.axioms" in registered_checks("kernels")

    def test_kernels_pass(self, config):
        """Test that the kernel suite passes at k = 0."""
        report = run_suite(config)

        assert report.status == ReportStatus.PASSED
        assert report.all_passed
        ids = {c.check_id for c in report.checks}
        assert {"kernels.E0_exp", "kernels.symmetry", "kernels.heat_mass"} <= ids
        assert "kernels.E1_cosh" not in ids
        assert report.config["suite"] == "kernels"

    def test_check_error_is_recorded(self, config):
        """Test that a raising check is recorded and the run continues."""
        with patch("dunklsb.api.checks.gamma_factor", side_effect=OverflowError("boom")):
            report = run_suite(config)

        assert report.status == ReportStatus.ERROR
        assert [e.check_id for e in report.errors] == ["kernels.gamma_factor"]
        assert report.errors[0].data["error_type"] == "OverflowError"
        failed = [c.check_id for c in report.failures]
        assert failed == ["kernels.gamma_factor"]
        assert any(c.check_id == "kernels.symmetry" and c.passed for c in report.checks)

    def test_deterministic(self, config):
        """Test that two runs agree apart from runtimes."""
        assert stripped(run_suite(config)) == stripped(run_suite(config))

    def test_workers(self, tmp_path):
        """Test that parallel runs give the same records as serial ones."""
        serial = SuiteConfig(suite="kernels", k=[0.0, 1.0], t=[1.0], nodes=40, cache_dir=tmp_path / "rules")
        parallel = serial.model_copy(update={"workers": 2})

        def checks(report):
            return [r for r in stripped(report)["records"] if r["kind"] == "check"]

        assert checks(run_suite(serial)) == checks(run_suite(parallel))

    def test_axiom_error_scales(self, config):
        """Test that the axiom records name their normalization and report the 1 + |E| one."""
        report = run_suite(config)

        symmetry = next(c for c in report.checks if c.check_id == "kernels.symmetry")
        assert symmetry.params["error_scale"] == "exp(|z||w|)"
        info = next(r for r in report.records if isinstance(r, InfoRecord) and r.check_id == "kernels.axioms")
        assert info.data["error_scale"] == "1+|E|"
        assert {"symmetry", "scaling", "conjugation"} <= set(info.data)
        assert info.data["symmetry"] <= 1e-12


def run_registered(check_id, config, setup):
    """Run one registered check at one parameter point."""
    fn = dict(checks._REGISTRY[check_id.split(".")[0]])[check_id]
    return checks._run_check(checks.CheckContext(config=config, setup=setup), check_id, fn)


class TestChecks:
    """Tests for individual checks of the suites."""

    def test_restriction_principle(self, setup_k1):
        """Test that U = C is certified by the factorization and RR* residuals."""
        records = run_registered("polar.U_equals_C", SuiteConfig(suite="polar"), setup_k1)

        results = {r.check_id: r for r in records if isinstance(r, CheckRecord)}
        assert {"polar.U_equals_C", "polar.RR_star", "polar.isometry", "polar.norm_bound"} <= set(results)
        assert all(r.passed for r in results.values()), [r.message for r in results.values()]
        assert results["polar.U_equals_C"].params["pad"] == CERTIFICATE_PAD
        assert results["polar.U_equals_C"].abs_err <= 1e-5

        info = next(r for r in records if isinstance(r, InfoRecord))
        assert info.data["max_deg"] == 10
        assert info.data["coarse_leading_column_err"] is not None
        assert "leading_column_err" in info.data

    def test_semigroup_in_two_dimensions(self, setup_2d):
        """Test that N = 2 checks the product form of the heat kernel."""
        config = SuiteConfig(suite="transforms", k=[0.5, 1.5], dims=[2], t=[1.0], nodes=20)
        records = run_registered("transforms.semigroup", config, setup_2d)

        product = next(r for r in records if isinstance(r, CheckRecord))
        assert product.check_id == "transforms.semigroup_product"
        assert product.passed
        info = next(r for r in records if isinstance(r, InfoRecord))
        assert "product" in info.message
