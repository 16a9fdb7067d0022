"""
Command-line interface for Dunkl Segal-Bargmann verification runs.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from dunklsb.api import SuiteConfig, run_suite
from dunklsb.core.kernel import dunkl_kernel, heat_kernel
from dunklsb.core.polar import CERTIFICATE_PAD, verify_restriction_principle
from dunklsb.core.quadrature import gauss_rule_1d, tensor_rule
from dunklsb.core.transforms import ORDER_HEADROOM
from dunklsb.errors import DunklError
from dunklsb.models import (
    MultiplicitySetup,
    ReportStatus,
    VerificationReport,
    export_csv,
    get_app_dir,
    get_cache_dir,
    list_cached_rules,
    load_report,
    save_report,
    set_cache_dir,
)

EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NUMERICAL = 3


def parse_complex(text: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'bi' or 'a' into a complex number."""
    cleaned = text.strip().replace(" ", "").replace("I", "i")
    if not cleaned:
        raise ValueError("empty complex number")
    return complex(cleaned.replace("i", "j"))


def _float_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {value!r}")


def _int_list(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of integers, got {value!r}")


def _complex_list(ctx: click.Context, param: click.Parameter, value: str) -> List[complex]:
    try:
        return [parse_complex(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected complex numbers like 1+2i, got {value!r}")


def _format_number(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        if len(value) == 2:
            return f"{value[0]:.6g}{value[1]:+.6g}i"
        return "[" + ", ".join(f"{v:.4g}" for v in value) + "]"
    return f"{value:.6g}"


def _format_params(params: Dict[str, Any]) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(params.items()))


def render_report(console: Console, report: VerificationReport, failures_only: bool = False) -> None:
    """Print the check records of a report as a table, then its summary."""
    checks = report.failures if failures_only else report.checks
    if checks:
        table = Table(title=f"Checks ({report.suite})")
        table.add_column("Check", style="cyan")
        table.add_column("Params")
        table.add_column("Value")
        table.add_column("Abs err")
        table.add_column("Rel err")
        table.add_column("Tol")
        table.add_column("Status", style="bold")
        for c in checks:
            status = "[green]pass[/green]" if c.passed else "[red]FAIL[/red]"
            table.add_row(
                c.check_id,
                _format_params(c.params),
                _format_number(c.value),
                f"{c.abs_err:.2e}",
                f"{c.rel_err:.2e}",
                f"{c.tol:.1e}",
                status,
            )
        console.print(table)

    for record in report.errors:
        console.print(f"[red]Error[/red] {record.message}")
    for record in report.warnings:
        console.print(f"[yellow]Warning[/yellow] {record.check_id}: {record.message}")

    summary = report.summary
    status_colors = {
        ReportStatus.PASSED: "green",
        ReportStatus.FAILED: "red",
        ReportStatus.ERROR: "red",
        ReportStatus.RUNNING: "blue",
    }
    color = status_colors[report.status]
    console.print(
        f"\n[bold]{summary.passed}/{summary.total}[/bold] checks passed, "
        f"{summary.failed} failed: [{color}]{report.status.value}[/{color}]"
    )


@click.group()
@click.version_option()
def cli():
    """Numerical verification of the Dunkl Segal-Bargmann restriction principle."""
    pass


@cli.command()
@click.option(
    "--suite",
    type=click.Choice(["kernels", "quadrature", "spaces", "transforms", "polar", "all"]),
    default=None,
    help="Suite to run (default: all)",
)
@click.option("--k", "k", callback=_float_list, help="Comma-separated multiplicities")
@click.option("--t", "t", callback=_float_list, help="Comma-separated time parameters")
@click.option("--dims", callback=_int_list, help="Comma-separated dimensions N")
@click.option("--nodes", type=int, help="Quadrature nodes per axis")
@click.option("--degree", type=int, help="Degree cap D of coefficient series")
@click.option("--basis", type=int, help="Domain truncation max_deg of the polar checks")
@click.option("--tol-scale", type=float, help="Factor applied to every tolerance")
@click.option("--seed", type=int, help="Seed for random sample points")
@click.option("--workers", type=int, help="Parameter points run in parallel")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), help="Quadrature cache directory")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="JSON configuration file")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the report as JSON")
@click.option("--csv/--no-csv", "csv", default=None, help="Also write the check records as CSV")
@click.option("--all-rows/--failures-only", default=False, help="Print every check, not only failures")
def verify(config_file: Optional[Path], out: Optional[Path], all_rows: bool, **options: Any):
    """Run verification suites over a parameter grid."""
    console = Console()
    ctx = click.get_current_context()

    try:
        data: Dict[str, Any] = {}
        if config_file is not None:
            with open(config_file, "r") as f:
                data = json.load(f)
        data.update({key: value for key, value in options.items() if value is not None})
        config = SuiteConfig.model_validate(data)
    except (json.JSONDecodeError, ValidationError, ValueError) as e:
        console.print(f"[red]Invalid configuration:[/red] {e}")
        ctx.exit(EXIT_BAD_CONFIG)

    report = run_suite(config)
    render_report(console, report, failures_only=not all_rows)

    if out is not None:
        save_report(report, out)
        console.print(f"Report written to [bold]{out}[/bold]")
    if config.csv:
        csv_path = out.with_suffix(".csv") if out is not None else Path("report.csv")
        export_csv(report, csv_path)
        console.print(f"Check records written to [bold]{csv_path}[/bold]")

    ctx.exit(0 if report.all_passed else EXIT_FAILED)


@cli.command()
@click.option("--k", "k", callback=_float_list, required=True, help="Comma-separated multiplicities")
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="Time parameter")
@click.option("--z", "z", callback=_complex_list, required=True, help="First argument, e.g. 1+2i,0.5")
@click.option("--w", "w", callback=_complex_list, required=True, help="Second argument")
def kernel(k: List[float], t: float, z: List[complex], w: List[complex]):
    """Evaluate the Dunkl kernel and the heat kernel at one pair of points."""
    console = Console()
    try:
        setup = MultiplicitySetup.of(k, t)
        e_value = dunkl_kernel(setup, np.array(z), np.array(w))
        rho_value = heat_kernel(setup, np.array(z), np.array(w), t)
    except (ValidationError, ValueError) as e:
        console.print(f"[red]{e}[/red]")
        click.get_current_context().exit(EXIT_BAD_CONFIG)
    except (DunklError, OverflowError) as e:
        console.print(f"[red]Numerical failure:[/red] {e}")
        click.get_current_context().exit(EXIT_NUMERICAL)

    table = Table(title=f"Kernels at {setup.key}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value")
    table.add_row("E(z, w)", f"{e_value.real:.15g}{e_value.imag:+.15g}i")
    table.add_row(f"rho_{t:g}(z, w)", f"{rho_value.real:.15g}{rho_value.imag:+.15g}i")
    console.print(table)


@cli.command()
@click.option("--k", "k", type=float, required=True, help="Multiplicity")
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="Time parameter")
@click.option("--nodes", type=int, default=80, show_default=True, help="Number of nodes")
@click.option("--print", "print_rule", is_flag=True, help="Print every node and weight")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), help="Quadrature cache directory")
def quad(k: float, t: float, nodes: int, print_rule: bool, cache_dir: Optional[Path]):
    """Build (or load from the cache) a one-dimensional Gauss rule."""
    console = Console()
    set_cache_dir(cache_dir)
    try:
        rule = gauss_rule_1d(k, t, nodes, use_cache=True)
    except ValueError as e:
        console.print(f"[red]{e}[/red]")
        click.get_current_context().exit(EXIT_BAD_CONFIG)

    console.print(
        f"Gauss rule k={k:g}, t={t:g}: [bold]{rule.size}[/bold] nodes, "
        f"span {rule.span:.6g}, weight sum {np.sum(rule.weights):.17g}"
    )
    if print_rule:
        table = Table(title="Nodes and weights")
        table.add_column("#", style="cyan")
        table.add_column("Node")
        table.add_column("Weight")
        for i, (x, w) in enumerate(zip(rule.nodes[:, 0], rule.weights)):
            table.add_row(str(i), f"{x:.17g}", f"{w:.17g}")
        console.print(table)


@cli.command()
@click.option("--k", "k", callback=_float_list, required=True, help="Comma-separated multiplicities")
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="Time parameter")
@click.option("--basis", type=int, default=10, show_default=True, help="Domain truncation max_deg")
@click.option("--pad", type=int, default=CERTIFICATE_PAD, show_default=True, help="Codomain degrees beyond max_deg")
@click.option("--degree", type=int, help="Degree cap D (default: basis + pad)")
@click.option("--nodes", type=int, help="Quadrature nodes per axis (default: max(80, D + 10))")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the result as JSON")
def polar(
    k: List[float],
    t: float,
    basis: int,
    pad: int,
    degree: Optional[int],
    nodes: Optional[int],
    out: Optional[Path],
):
    """Compare the polar factor of the truncated R* with the matrix of C."""
    console = Console()
    degree = degree if degree is not None else basis + pad
    nodes = nodes if nodes is not None else max(80, degree + ORDER_HEADROOM)
    try:
        setup = MultiplicitySetup.of(k, t)
        rule = tensor_rule(setup, nodes, use_cache=True)
        rule2t = tensor_rule(setup.at_time(2.0 * t), nodes, use_cache=True)
        result = verify_restriction_principle(setup, basis, rule, rule2t, degree, pad)
    except (ValidationError, ValueError) as e:
        console.print(f"[red]{e}[/red]")
        click.get_current_context().exit(EXIT_BAD_CONFIG)
    except (DunklError, OverflowError) as e:
        console.print(f"[red]Numerical failure:[/red] {e}")
        click.get_current_context().exit(EXIT_NUMERICAL)

    table = Table(title=f"Restriction principle at {setup.key}, max_deg={basis}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value")
    for name, value in result.model_dump(exclude={"singular_values", "max_deg"}).items():
        table.add_row(name, f"{value:.3e}")
    console.print(table)

    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as f:
            f.write(result.model_dump_json(indent=2))
        console.print(f"Result written to [bold]{out}[/bold]")


@cli.command()
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--failures-only/--all-rows", default=False, help="Only list failed checks")
def show(report_path: Path, failures_only: bool):
    """Render a saved verification report."""
    console = Console()
    try:
        report = load_report(report_path)
    except (json.JSONDecodeError, ValidationError, ValueError) as e:
        console.print(f"[red]Not a verification report: {e}[/red]")
        click.get_current_context().exit(EXIT_BAD_CONFIG)
    render_report(console, report, failures_only=failures_only)


@cli.command()
def dir():
    """Show the application directory and the cached quadrature rules."""
    console = Console()
    app_dir = get_app_dir()
    console.print(f"Application directory: [bold]{app_dir}[/bold]")
    console.print(f"Quadrature cache: [bold]{get_cache_dir()}[/bold]")

    rules = list_cached_rules()
    if not rules:
        console.print("[yellow]No cached rules yet. They are written by verify, quad and polar.[/yellow]")
        return

    console.print("\nCached rules:")
    for item in rules:
        console.print(f"  [cyan]{item.name}[/cyan] ({item.stat().st_size} bytes)")


if __name__ == "__main__":
    cli()
