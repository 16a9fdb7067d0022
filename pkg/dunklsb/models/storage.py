"""
Storage functionality for quadrature rules and verification reports.
"""

import json
import os
from pathlib import Path
from typing import List, Optional, Tuple

import click
import numpy as np
import pandas as pd
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from dunklsb.models.report import VerificationReport

QUADRATURE_SCHEMA = "quadrule/1"

# set by --cache-dir; None means <app dir>/quadrature
_cache_dir_override: Optional[Path] = None


class QuadratureCacheRecord(BaseModel):
    """One cached one-dimensional Gauss rule."""

    model_config = ConfigDict(populate_by_name=True)

    schema_id: str = Field(default=QUADRATURE_SCHEMA, alias="schema")
    k: float
    t: float
    n: int
    nodes: List[float]
    weights: List[float]

    @field_serializer("nodes", "weights")
    def _full_precision(self, values: List[float]) -> List[float]:
        # 17 significant digits round-trip every double
        return [float(f"{v:.17g}") for v in values]


def get_app_dir() -> Path:
    """
    Get the application directory for cached rules and reports.
    Uses click's app directory functionality.

    Returns:
        Path to the application directory
    """
    app_dir = Path(click.get_app_dir("dunklsb"))
    os.makedirs(app_dir, exist_ok=True)
    return app_dir


def set_cache_dir(path: Optional[Path]) -> None:
    """Redirect the quadrature cache, or restore the default with None."""
    global _cache_dir_override
    _cache_dir_override = Path(path) if path is not None else None


def get_cache_dir() -> Path:
    """
    Get the directory holding cached quadrature rules.

    Returns:
        Path to the cache directory
    """
    cache_dir = _cache_dir_override or get_app_dir() / "quadrature"
    os.makedirs(cache_dir, exist_ok=True)
    return cache_dir


def quadrature_file_path(k: float, t: float, n: int) -> Path:
    return get_cache_dir() / f"q_{k:g}_{t:g}_{n}.json"


def save_quadrature(k: float, t: float, n: int, nodes: NDArray, weights: NDArray) -> Path:
    """
    Write a rule to the cache.

    Returns:
        Path to the written file
    """
    record = QuadratureCacheRecord(
        k=k,
        t=t,
        n=n,
        nodes=[float(x) for x in np.ravel(nodes)],
        weights=[float(w) for w in np.ravel(weights)],
    )
    file_path = quadrature_file_path(k, t, n)
    with open(file_path, "w") as f:
        f.write(record.model_dump_json(indent=2, by_alias=True))
    return file_path


def load_quadrature(k: float, t: float, n: int) -> Optional[Tuple[NDArray, NDArray]]:
    """
    Read a rule from the cache.

    Returns:
        (nodes, weights), or None if the file is missing, corrupt or does
        not describe the requested rule
    """
    file_path = quadrature_file_path(k, t, n)
    if not file_path.exists():
        return None
    try:
        with open(file_path, "r") as f:
            data = json.load(f)
        record = QuadratureCacheRecord.model_validate(data)
    except (json.JSONDecodeError, ValueError) as e:
        # a corrupt file is rebuilt by the caller
        click.echo(f"Ignoring cached rule {file_path.name}: {e}", err=True)
        return None
    if record.schema_id != QUADRATURE_SCHEMA or record.n != n or len(record.nodes) != n:
        return None
    return np.array(record.nodes), np.array(record.weights)


def list_cached_rules() -> List[Path]:
    return sorted(get_cache_dir().glob("q_*.json"))


def save_report(report: VerificationReport, path: Path) -> None:
    """
    Save a verification report as JSON.

    Args:
        report: The report to save
        path: Destination file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(report.model_dump_json(indent=2, by_alias=True))


def load_report(path: Path) -> VerificationReport:
    """
    Load a verification report.

    Raises:
        ValueError: if the file is not a readable report
    """
    with open(path, "r") as f:
        data = json.load(f)
    return VerificationReport.model_validate(data)


def report_dataframe(report: VerificationReport) -> pd.DataFrame:
    """The check records of a report as a DataFrame, one row per check."""
    return pd.DataFrame(report.check_rows())


def export_csv(report: VerificationReport, path: Path) -> Path:
    """
    Write the check records of a report as CSV.

    Returns:
        Path to the written file
    """
    path = Path(path)
    report_dataframe(report).to_csv(path, index=False)
    return path
