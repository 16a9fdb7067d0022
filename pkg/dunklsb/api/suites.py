"""
API for running verification suites.
"""

import contextlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, Generator, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dunklsb.api.checks import SUITE_NAMES, run_point
from dunklsb.models import BaseRecord, MultiplicitySetup, VerificationReport, set_cache_dir

DEFAULT_T = (0.5, 1.0, 2.0)

# per dimension; any other N falls back to k_j = 1
DEFAULT_K: Dict[int, List[Tuple[float, ...]]] = {
    1: [(0.0,), (0.5,), (1.0,), (2.5,)],
    2: [(0.5, 1.5)],
}


class SuiteConfig(BaseModel):
    """
    Everything run_suite needs.

    k and t default to the standard grid. With dims = 1 every listed k is its
    own parameter point; with dims > 1 the list is either one multiplicity
    vector of length dims or a single value applied to every coordinate.
    """

    model_config = ConfigDict(extra="forbid")

    suite: Literal["kernels", "quadrature", "spaces", "transforms", "polar", "all"] = "all"
    k: Optional[List[float]] = None
    t: Optional[List[float]] = None
    dims: Optional[List[int]] = None
    nodes: int = Field(default=80, ge=4)
    degree: int = Field(default=40, ge=8)
    basis: int = Field(default=10, ge=1)
    tol_scale: float = Field(default=1.0, gt=0.0)
    seed: int = 42
    workers: int = Field(default=1, ge=1)
    cache_dir: Optional[Path] = None
    csv: bool = False

    @model_validator(mode="after")
    def _valid_grid(self) -> "SuiteConfig":
        if self.t is not None and (not self.t or any(t <= 0 for t in self.t)):
            raise ValueError(f"t values must be positive, got {self.t}")
        if self.k is not None and (not self.k or any(k < 0 for k in self.k)):
            raise ValueError(f"k values must be nonnegative, got {self.k}")
        if self.dims is not None and (not self.dims or any(n < 1 for n in self.dims)):
            raise ValueError(f"dims must be positive, got {self.dims}")
        if self.k is not None:
            for n in self.dims or [1]:
                if n > 1 and len(self.k) not in (1, n):
                    raise ValueError(f"{len(self.k)} multiplicities do not fit N={n}")
        if self.degree < self.basis + 8:
            raise ValueError(f"degree {self.degree} must exceed basis {self.basis} by at least 8")
        return self

    @property
    def suites(self) -> List[str]:
        return list(SUITE_NAMES) if self.suite == "all" else [self.suite]

    def _multiplicities(self, n: int) -> List[Tuple[float, ...]]:
        if self.k is None:
            return DEFAULT_K.get(n, [(1.0,) * n])
        if n == 1:
            return [(k,) for k in self.k]
        if len(self.k) == 1:
            return [(self.k[0],) * n]
        return [tuple(self.k)]

    def parameter_points(self) -> List[MultiplicitySetup]:
        """The (k, t, N) grid in a fixed order."""
        dims = self.dims or ([1] if self.k is not None else sorted(DEFAULT_K))
        ts = self.t or list(DEFAULT_T)
        points = []
        for n in dims:
            for k in self._multiplicities(n):
                for t in ts:
                    points.append(MultiplicitySetup(N=n, k=k, t=t))
        return points


@contextlib.contextmanager
def verification(
    suite: str, config: Optional[Dict[str, Any]] = None
) -> Generator[VerificationReport, None, None]:
    """
    Context manager for one verification run.

    Args:
        suite: Name of the suite being run
        config: Configuration values recorded at the start of the report

    Yields:
        The report; records are sorted and the run marked complete on exit
    """
    report = VerificationReport(suite=suite)
    report.start(f"Starting verification: {suite}")
    if config:
        for key, value in config.items():
            report.set_config(key, value)

    try:
        yield report
        report.complete()
    except Exception as e:
        report.fail(str(e), details=type(e).__name__)
        raise
    finally:
        report.sort_records()


def _run_point(config: SuiteConfig, setup: MultiplicitySetup) -> List[BaseRecord]:
    # worker processes do not inherit the cache override
    set_cache_dir(config.cache_dir)
    return run_point(config, setup)


def run_suite(config: SuiteConfig) -> VerificationReport:
    """
    Run the selected suites over every parameter point of config.

    A failing or raising check is recorded and the run continues. Records are
    sorted, so the report does not depend on the number of workers.

    Args:
        config: The suite configuration

    Returns:
        The completed report
    """
    set_cache_dir(config.cache_dir)
    points = config.parameter_points()
    with verification(config.suite, config.model_dump(mode="json")) as report:
        if config.workers > 1 and len(points) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                batches = list(pool.map(_run_point, [config] * len(points), points))
        else:
            batches = [_run_point(config, setup) for setup in points]
        for records in batches:
            report.extend(records)
    return report
