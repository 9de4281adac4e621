"""
Command-line interface for degree0.

Provides the main CLI using Typer with global options and the classify,
verify-witness and experiment command groups.
"""

import logging
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from typer import Typer

from . import __version__, hopf, k3, torus
from .config import CONFIG_SUFFIXES, init_config
from .exactfield import InvalidRadicand, OutOfModuliError
from .experiments import COLUMNS, DEFAULT_FORM, DEFAULT_RADICANDS, ExperimentSpec, run_experiment
from .export import ExperimentExporter, ReportExporter, save_to_file
from .health import check_output_path, run_health_check
from .inputs import InputError, load_job, parse_hopf, parse_k3, parse_radicands, parse_torus

logger = logging.getLogger(__name__)

# Errors caused by the job rather than by the program; they exit with code 2.
INPUT_ERRORS = (
    OutOfModuliError,
    InputError,
    InvalidRadicand,
    torus.ExhaustedRetries,
    k3.CannotSolveAtHeight,
    hopf.NoWitnessForDegree0,
)

app = Typer(
    name="degree0",
    help="degree0 - exact transcendence degree of complex tori, Hopf surfaces and K3 surfaces",
    add_completion=False,
    rich_markup_mode="rich"
)
classify_app = Typer(help="Classify a single surface", add_completion=False)
verify_app = Typer(help="Check invariant functions by exact identity", add_completion=False)
experiment_app = Typer(help="Run seeded density experiments", add_completion=False)
app.add_typer(classify_app, name="classify")
app.add_typer(verify_app, name="verify-witness")
app.add_typer(experiment_app, name="experiment")


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


def version_callback(value: bool):
    """Callback for --version flag."""
    if value:
        typer.echo(f"degree0 version {__version__}")
        raise typer.Exit()


def validate_config_file(value: Optional[str]) -> Optional[str]:
    if value is None:
        return value
    path = Path(value)
    if not path.exists():
        print(f"Error: Config file not found: {value}", file=sys.stderr)
        raise typer.Exit(1)
    if path.suffix.lower() not in CONFIG_SUFFIXES:
        print(f"Error: Unsupported config file format: {path.suffix}", file=sys.stderr)
        raise typer.Exit(1)
    return value


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit"
    ),
    debug: bool = typer.Option(
        False,
        "--debug",
        help="Enable debug logging with JSON format"
    ),
    config: Optional[str] = typer.Option(
        None,
        "--config",
        help="Path to alternate configuration file (.env or .yaml)",
        callback=validate_config_file
    )
):
    """
    degree0 - decide how many algebraically independent meromorphic functions
    a compact complex surface carries.

    Complex 2-tori, Hopf surfaces and K3 surfaces are classified with exact
    arithmetic over multi-quadratic number fields. Every verdict comes with a
    certificate or a witness, and seeded experiments estimate how often each
    verdict occurs in a moduli space.
    """
    try:
        init_config(config_file=config, debug=debug)
        logger.debug("Configuration initialized successfully")
    except Exception as e:
        typer.echo(f"Error initializing configuration: {e}", err=True)
        raise typer.Exit(1)

    try:
        success, issues = run_health_check()
    except Exception as e:
        print(f"Error during health check: {e}", file=sys.stderr)
        raise typer.Exit(1)
    if not success:
        print("Health check failed:", file=sys.stderr)
        for issue in issues:
            print(f"  - {issue}", file=sys.stderr)
        raise typer.Exit(1)


@contextmanager
def exit_codes(action: str):
    """Map job errors to exit code 2 and anything unexpected to exit code 1."""
    try:
        yield
    except typer.Exit:
        raise
    except INPUT_ERRORS as e:
        typer.echo(f"❌ {e}", err=True)
        logger.debug(f"{action} rejected input: {e}")
        raise typer.Exit(2)
    except Exception as e:
        typer.echo(f"❌ Unexpected error during {action}: {e}", err=True)
        logger.exception(f"Unexpected error during {action}")
        raise typer.Exit(1)


def _emit(content: str, output: Optional[str]) -> None:
    if output is None:
        typer.echo(content, nl=False)
        return
    issues = check_output_path(output)
    if issues:
        raise InputError("; ".join(issues))
    if not save_to_file(content, output):
        raise OSError(f"Failed to write {output}")
    typer.echo(f"✅ Output written to {output}", err=True)


def _emit_report(report: Dict[str, Any], format_type: OutputFormat, output: Optional[str]) -> None:
    _emit(ReportExporter.export(report, format_type.value), output)


INPUT_OPTION = typer.Option(None, "--input", "-i", help="JSON job file")
EXAMPLE_OPTION = typer.Option(None, "--example", help="Built-in named example")
FORMAT_OPTION = typer.Option(OutputFormat.JSON, "--format", help="Output format")
OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Write output to this file instead of stdout")


@classify_app.command("torus")
def classify_torus(
    input_path: Optional[str] = INPUT_OPTION,
    example: Optional[str] = EXAMPLE_OPTION,
    convention: torus.SConvention = typer.Option(
        torus.SConvention.DISPLAYED,
        "--convention",
        help="displayed: z21 = n*z12, transposed: z12 = n*z21"
    ),
    format_type: OutputFormat = FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Classify a torus with period matrix (I, Z)."""
    with exit_codes("torus classification"):
        Z = parse_torus(load_job("torus", input_path, example))
        report = torus.classify(Z, convention)
        _emit_report(report.to_dict(), format_type, output)


@classify_app.command("hopf")
def classify_hopf(
    input_path: Optional[str] = INPUT_OPTION,
    example: Optional[str] = EXAMPLE_OPTION,
    bound: Optional[int] = typer.Option(None, "--bound", min=1, help="Height bound for the bounded dependence search"),
    format_type: OutputFormat = FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Classify the Hopf surface of a contraction t."""
    with exit_codes("Hopf classification"):
        data = load_job("hopf", input_path, example)
        t = parse_hopf(data)
        report = hopf.classify(t, bound or data.get("height_bound"))
        _emit_report(report.to_dict(), format_type, output)


@classify_app.command("k3")
def classify_k3(
    input_path: Optional[str] = INPUT_OPTION,
    example: Optional[str] = EXAMPLE_OPTION,
    form: Optional[str] = typer.Option(None, "--form", help="Preset lattice overriding the job's form, e.g. k3 or U+U"),
    expect_k3: bool = typer.Option(False, "--expect-k3", help="Require a rank 22 form of signature (3, 19)"),
    format_type: OutputFormat = FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Classify a K3 period point against an intersection form."""
    with exit_codes("K3 classification"):
        lam, A = parse_k3(load_job("k3", input_path, example), form)
        form_report = k3.check_form(A, expect_k3=expect_k3)
        report = k3.classify(lam, A).to_dict()
        report["form"] = form_report.to_dict()
        _emit_report(report, format_type, output)


@verify_app.command("hopf")
def verify_witness_hopf(
    input_path: Optional[str] = INPUT_OPTION,
    example: Optional[str] = EXAMPLE_OPTION,
    bound: Optional[int] = typer.Option(None, "--bound", min=1, help="Height bound for the bounded dependence search"),
    format_type: OutputFormat = FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Build the invariant function of a degree-one Hopf surface and check f(tz) = f(z)."""
    with exit_codes("witness verification"):
        data = load_job("hopf", input_path, example)
        t = parse_hopf(data)
        report = hopf.classify(t, bound or data.get("height_bound"))
        if report.witness is None:
            raise hopf.NoWitnessForDegree0(
                f"t = {t.matrix} has degree zero; no invariant function to verify"
            )
        verified = hopf.verify_witness(report.witness, t)
        _emit_report({
            "family": "hopf",
            "class": report.hopf_class.value,
            "verdict": report.verdict.value,
            "witness": report.witness.to_dict(),
            "description": report.witness.description(),
            "verified": verified,
        }, format_type, output)


def _run_experiment(family: str, radicands: Optional[str], height: int, count: int, seed: int,
                    bound: Optional[int], form: str, workers: Optional[int], progress: bool,
                    format_type: OutputFormat, output: Optional[str]) -> None:
    with exit_codes(f"{family} experiment"):
        parsed = parse_radicands(radicands) if radicands is not None else DEFAULT_RADICANDS[family]
        if family == "hopf" and height < 2:
            raise InputError("Hopf sampling needs --height >= 2 to reach eigenvalue moduli > 1")
        if family == "k3":
            try:
                k3.IntersectionForm.preset(form)
            except k3.K3Error as e:
                raise InputError(str(e))
        spec = ExperimentSpec(
            family=family, count=count, seed=seed, height=height, radicands=parsed,
            bound=bound, form=form, workers=workers,
        )
        rows, summary = run_experiment(spec, progress=progress)
        _emit(ExperimentExporter.export(COLUMNS[family], rows, summary, format_type.value), output)


RADICANDS_OPTION = typer.Option(None, "--radicands", help="Comma-separated radicands, e.g. -1,2,3,5,7")
HEIGHT_OPTION = typer.Option(7, "--height", min=1, help="Height bound on sampled coordinates")
COUNT_OPTION = typer.Option(100, "--count", min=1, help="Number of samples")
SEED_OPTION = typer.Option(0, "--seed", help="Experiment seed")
WORKERS_OPTION = typer.Option(None, "--workers", min=1, help="Work-pool size (default from DEGREE0_WORKERS)")
PROGRESS_OPTION = typer.Option(False, "--progress", help="Show a progress bar on stderr")
EXPERIMENT_FORMAT_OPTION = typer.Option(OutputFormat.CSV, "--format", help="Output format")


@experiment_app.command("torus")
def experiment_torus(
    radicands: Optional[str] = RADICANDS_OPTION,
    height: int = HEIGHT_OPTION,
    count: int = COUNT_OPTION,
    seed: int = SEED_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
    progress: bool = PROGRESS_OPTION,
    format_type: OutputFormat = EXPERIMENT_FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Sample period matrices in M and tally their verdicts."""
    _run_experiment("torus", radicands, height, count, seed, None, DEFAULT_FORM, workers, progress, format_type, output)


@experiment_app.command("hopf")
def experiment_hopf(
    height: int = HEIGHT_OPTION,
    count: int = COUNT_OPTION,
    seed: int = SEED_OPTION,
    bound: Optional[int] = typer.Option(None, "--bound", min=1, help="Height bound for the bounded dependence search"),
    workers: Optional[int] = WORKERS_OPTION,
    progress: bool = PROGRESS_OPTION,
    format_type: OutputFormat = EXPERIMENT_FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Sample rational diagonal contractions and tally their verdicts."""
    _run_experiment("hopf", None, height, count, seed, bound, DEFAULT_FORM, workers, progress, format_type, output)


@experiment_app.command("k3")
def experiment_k3(
    radicands: Optional[str] = RADICANDS_OPTION,
    height: int = HEIGHT_OPTION,
    count: int = COUNT_OPTION,
    seed: int = SEED_OPTION,
    form: str = typer.Option(DEFAULT_FORM, "--form", help="Preset lattice to sample on"),
    workers: Optional[int] = WORKERS_OPTION,
    progress: bool = PROGRESS_OPTION,
    format_type: OutputFormat = EXPERIMENT_FORMAT_OPTION,
    output: Optional[str] = OUTPUT_OPTION,
):
    """Sample period points on the quadric and tally their verdicts."""
    _run_experiment("k3", radicands, height, count, seed, None, form, workers, progress, format_type, output)


def cli_main():
    """Console entry point; anything escaping Typer is logged and exits 1."""
    try:
        app()
    except typer.Exit:
        raise
    except Exception as e:
        typer.echo(f"Unexpected error: {e}", err=True)
        logger.exception("Unexpected error in CLI")
        sys.exit(1)


if __name__ == "__main__":
    cli_main()
