"""
API for running verification suites.
"""
from dunklsb.api.checks import SUITE_NAMES, CheckContext, registered_checks, run_point
from dunklsb.api.suites import SuiteConfig, run_suite, verification

__all__ = [
    "SUITE_NAMES",
    "CheckContext",
    "SuiteConfig",
    "registered_checks",
    "run_point",
    "run_suite",
    "verification",
]
