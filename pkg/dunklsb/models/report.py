"""
Verification report model definitions.
"""

import json
import math
from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field

REPORT_SCHEMA = "dunklsb-report/1"


class RecordKind(str, Enum):
    """Type of report record."""

    START = "start"
    END = "end"
    CONFIG = "config"
    CHECK = "check"
    WARNING = "warning"
    INFO = "info"
    ERROR = "error"


class CheckMode(str, Enum):
    """Which error a check's tolerance applies to."""

    REL = "rel"
    ABS = "abs"
    EITHER = "either"


class ReportStatus(str, Enum):
    """Overall outcome of a verification run."""

    RUNNING = "running"
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class BaseRecord(BaseModel):
    """
    Base record of a verification report.

    Records carry no wall-clock timestamps so that two runs of the same
    configuration serialize identically apart from runtime_ms.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    kind: RecordKind
    message: str = ""
    check_id: str = ""
    params: Dict[str, Any] = Field(default_factory=dict)
    data: Dict[str, Any] = Field(default_factory=dict)

    @property
    def params_key(self) -> str:
        return json.dumps(self.params, sort_keys=True, default=str)


class StartRecord(BaseRecord):
    """Record for the start of a run."""
    kind: Literal[RecordKind.START] = RecordKind.START
    message: str = "Verification started"


class EndRecord(BaseRecord):
    """Record for the end of a run."""
    kind: Literal[RecordKind.END] = RecordKind.END
    message: str = "Verification completed"


class ConfigRecord(BaseRecord):
    """Record for one configuration value."""
    kind: Literal[RecordKind.CONFIG] = RecordKind.CONFIG
    key: str
    value: Any
    message: str = ""

    def model_post_init(self, __context: Any) -> None:
        if not self.message:
            self.message = f"Config: {self.key} = {self.value}"
        self.data.update({"key": self.key, "value": self.value})


class CheckRecord(BaseRecord):
    """
    Record for one numerical check.

    passed is derived from the errors and the declared mode; a non-finite
    error never passes.
    """
    kind: Literal[RecordKind.CHECK] = RecordKind.CHECK
    value: Union[float, List[float], None] = None
    reference: Union[float, List[float], None] = None
    abs_err: float = 0.0
    rel_err: float = 0.0
    tol: float
    mode: CheckMode = CheckMode.EITHER
    passed: bool = False
    runtime_ms: float = 0.0

    def model_post_init(self, __context: Any) -> None:
        self.passed = self._evaluate()
        if not self.message:
            verdict = "pass" if self.passed else "FAIL"
            self.message = f"{self.check_id}: {verdict} (abs {self.abs_err:.2e}, rel {self.rel_err:.2e}, tol {self.tol:.1e})"

    def _evaluate(self) -> bool:
        abs_ok = math.isfinite(self.abs_err) and self.abs_err <= self.tol
        rel_ok = math.isfinite(self.rel_err) and self.rel_err <= self.tol
        if self.mode == CheckMode.ABS:
            return abs_ok
        if self.mode == CheckMode.REL:
            return rel_ok
        return abs_ok or rel_ok


class WarningRecord(BaseRecord):
    """Record for a numerical advisory raised during a check."""
    kind: Literal[RecordKind.WARNING] = RecordKind.WARNING
    category: str = "NumericalWarning"

    def model_post_init(self, __context: Any) -> None:
        self.data.update({"category": self.category})


class InfoRecord(BaseRecord):
    """Record for informational output, such as reported-only quantities."""
    kind: Literal[RecordKind.INFO] = RecordKind.INFO


class ErrorRecord(BaseRecord):
    """Record for an exception raised by a check."""
    kind: Literal[RecordKind.ERROR] = RecordKind.ERROR
    error_type: str = ""
    error_details: Optional[str] = None

    def model_post_init(self, __context: Any) -> None:
        self.data.update({"error_type": self.error_type})
        if self.error_details:
            self.data.update({"error_details": self.error_details})


Record = Annotated[
    Union[StartRecord, EndRecord, ConfigRecord, CheckRecord, WarningRecord, InfoRecord, ErrorRecord],
    Field(discriminator="kind"),
]

_KIND_RANK = {
    RecordKind.START: 0,
    RecordKind.CONFIG: 1,
    RecordKind.CHECK: 2,
    RecordKind.WARNING: 3,
    RecordKind.INFO: 4,
    RecordKind.ERROR: 5,
    RecordKind.END: 6,
}


class Summary(BaseModel):
    total: int
    passed: int
    failed: int


class VerificationReport(BaseModel):
    """
    Model representing one verification run: its configuration and every
    record produced while running it.
    """

    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants")

    report_schema: str = Field(default=REPORT_SCHEMA, alias="schema")
    suite: str = "all"
    records: List[Record] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def summary(self) -> Summary:
        checks = self.checks
        passed = sum(1 for c in checks if c.passed)
        return Summary(total=len(checks), passed=passed, failed=len(checks) - passed)

    @property
    def checks(self) -> List[CheckRecord]:
        return [r for r in self.records if isinstance(r, CheckRecord)]

    @property
    def failures(self) -> List[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    @property
    def errors(self) -> List[ErrorRecord]:
        return [r for r in self.records if isinstance(r, ErrorRecord)]

    @property
    def warnings(self) -> List[WarningRecord]:
        return [r for r in self.records if isinstance(r, WarningRecord)]

    @property
    def config(self) -> Dict[str, Any]:
        """Get the configuration of the run."""
        return {r.key: r.value for r in self.records if isinstance(r, ConfigRecord)}

    @property
    def status(self) -> ReportStatus:
        """Get the current status of the run."""
        if self.errors:
            return ReportStatus.ERROR
        if not any(r.kind == RecordKind.END for r in self.records):
            return ReportStatus.RUNNING
        return ReportStatus.FAILED if self.failures else ReportStatus.PASSED

    @property
    def all_passed(self) -> bool:
        return not self.failures and not self.errors

    def add_record(self, record: BaseRecord) -> None:
        """Add a record to the report."""
        self.records.append(record)  # type: ignore[arg-type]

    def extend(self, records: List[BaseRecord]) -> None:
        for record in records:
            self.add_record(record)

    def start(self, message: str = "Verification started") -> None:
        self.add_record(StartRecord(message=message))

    def complete(self) -> None:
        self.add_record(EndRecord())

    def fail(self, error_message: str, details: Optional[str] = None) -> None:
        """Record an error that aborted the run."""
        self.add_record(ErrorRecord(message=error_message, error_details=details))
        self.add_record(EndRecord(message="Verification aborted"))

    def set_config(self, key: str, value: Any) -> None:
        self.add_record(ConfigRecord(key=key, value=value))

    def sort_records(self) -> None:
        """Order records by kind, then check id, then parameters, then message."""
        self.records.sort(key=lambda r: (_KIND_RANK[r.kind], r.check_id, r.params_key, r.message))

    def check_rows(self) -> List[Dict[str, Any]]:
        """Flat rows of the check records, one per check."""
        rows = []
        for c in self.checks:
            row: Dict[str, Any] = {"check_id": c.check_id}
            row.update({f"param.{k}": v for k, v in sorted(c.params.items())})
            row.update(
                {
                    "value": c.value,
                    "reference": c.reference,
                    "abs_err": c.abs_err,
                    "rel_err": c.rel_err,
                    "tol": c.tol,
                    "mode": c.mode.value,
                    "pass": c.passed,
                    "runtime_ms": c.runtime_ms,
                }
            )
            rows.append(row)
        return rows
