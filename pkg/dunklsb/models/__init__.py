"""
Models for verification runs.
"""
from dunklsb.models.report import (
    REPORT_SCHEMA,
    BaseRecord,
    CheckMode,
    CheckRecord,
    ConfigRecord,
    EndRecord,
    ErrorRecord,
    InfoRecord,
    RecordKind,
    ReportStatus,
    StartRecord,
    Summary,
    VerificationReport,
    WarningRecord,
)
from dunklsb.models.results import (
    DiagramReport,
    KernelIdentityReport,
    PolarComparisonReport,
    RestrictionReport,
)
from dunklsb.models.setup import KernelEvalOptions, MultiplicitySetup
from dunklsb.models.storage import (
    QuadratureCacheRecord,
    export_csv,
    get_app_dir,
    get_cache_dir,
    list_cached_rules,
    load_quadrature,
    load_report,
    report_dataframe,
    save_quadrature,
    save_report,
    set_cache_dir,
)

__all__ = [
    "REPORT_SCHEMA",
    "BaseRecord",
    "CheckMode",
    "CheckRecord",
    "ConfigRecord",
    "EndRecord",
    "ErrorRecord",
    "InfoRecord",
    "RecordKind",
    "ReportStatus",
    "StartRecord",
    "Summary",
    "VerificationReport",
    "WarningRecord",
    "DiagramReport",
    "KernelIdentityReport",
    "PolarComparisonReport",
    "RestrictionReport",
    "KernelEvalOptions",
    "MultiplicitySetup",
    "QuadratureCacheRecord",
    "export_csv",
    "get_app_dir",
    "get_cache_dir",
    "list_cached_rules",
    "load_quadrature",
    "load_report",
    "report_dataframe",
    "save_quadrature",
    "save_report",
    "set_cache_dir",
]
