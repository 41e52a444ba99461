import json
from typing import Optional

import click
from pydantic import ValidationError

from app.cli.options import emit, format_option, params_options
from app.core.dependencies import get_check_middleware, resolve_params
from app.core.exceptions import bad_input_exception, check_failure_exception
from app.schemas.report import CheckStatus, VerificationReport
from app.services.verification import run_verification

STATUS_TAGS = {
    CheckStatus.passed: "PASS",
    CheckStatus.failed: "FAIL",
    CheckStatus.skipped: "SKIP",
}


def render_text(report: VerificationReport) -> str:
    lines = [f"{report.tool} {report.version}"]
    lines.append("params: " + ", ".join(f"{k}={v}" for k, v in report.params.items()))
    width = max((len(c.id) for c in report.checks), default=0)
    ref_width = max((len(c.reference) for c in report.checks), default=0)
    for record in report.checks:
        lines.append(
            f"[{STATUS_TAGS[record.status]}] {record.id.ljust(width)}  {record.reference.ljust(ref_width)}"
            f"  {record.claim}  ({record.elapsed_seconds:.3f}s)"
        )
        for key, value in record.witness.items():
            lines.append(f"       {key}: {value}")
    lines.append(f"verdict: {report.verdict.value.upper()}")
    return "\n".join(lines)


def render(report: VerificationReport, output_format: str) -> str:
    if output_format == "json":
        return report.model_dump_json(indent=2)
    return render_text(report)


def finish(report: VerificationReport) -> None:
    """Exit 1 when any check did not pass"""
    if report.exit_code():
        failed = [c.id for c in report.checks if not c.passed]
        raise check_failure_exception(f"verification failed: {', '.join(failed)}")


def load_report(path: str) -> VerificationReport:
    try:
        with open(path, encoding="utf-8") as fh:
            return VerificationReport.model_validate(json.load(fh))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise bad_input_exception(f"cannot read report {path}: {e}")


@click.command("report")
@click.option(
    "--input",
    "input_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Render a saved JSON report instead of running the checks.",
)
@params_options
@format_option
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def report(
    input_path: Optional[str],
    preset: Optional[str],
    params_file: Optional[str],
    precision: Optional[int],
    z: Optional[str],
    output_format: str,
    output: Optional[str],
):
    """
    Render a verification report as text or JSON.

    Runs every check unless --input names a saved JSON report.
    """
    if input_path:
        result = load_report(input_path)
    else:
        params = resolve_params(preset, params_file, precision, z)
        result = run_verification(params, middleware=get_check_middleware())
    emit(render(result, output_format), output)
    finish(result)
