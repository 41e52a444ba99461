import json
from typing import Optional

import click

from app.cli.options import emit, format_option, params_options
from app.core.config import settings
from app.core.dependencies import resolve_params
from app.core.exceptions import PreconditionError, bad_input_exception, check_failure_exception
from app.services.params import params_to_text, search, validate


@click.group("params")
def params():
    """Validate and search parameter tuples"""


@params.command("validate")
@params_options
@format_option
def validate_command(
    preset: Optional[str],
    params_file: Optional[str],
    precision: Optional[int],
    z: Optional[str],
    output_format: str,
):
    """Check every hypothesis on a tuple; exit 1 listing each failure"""
    tuple_ = resolve_params(preset, params_file, precision, z)
    report = validate(tuple_)
    if output_format == "json":
        click.echo(report.model_dump_json(indent=2))
    else:
        for check in report.checks:
            tag = "PASS" if check.passed else "FAIL"
            click.echo(f"[{tag}] {check.name}: {check.detail or ''}")
        click.echo("valid" if report.passed else "invalid")
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise check_failure_exception(f"params rejected: {names}")


@params.command("search")
@click.option(
    "--degree-bound",
    type=click.IntRange(0, settings.MAX_SEARCH_DEGREE),
    required=True,
    help="Maximal t-degree of w and of the polynomial part of c.",
)
@click.option("--limit", type=click.IntRange(1), default=settings.DEFAULT_SEARCH_LIMIT, show_default=True)
@format_option
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def search_command(degree_bound: int, limit: int, output_format: str, output: Optional[str]):
    """List tuples passing validation, one params block each"""
    try:
        found = search(degree_bound, limit)
    except PreconditionError as e:
        raise bad_input_exception(str(e))
    if output_format == "json":
        text = json.dumps([p.model_dump(mode="json") for p in found], indent=2)
    else:
        blocks = [f"# tuple {i + 1}\n{params_to_text(p)}" for i, p in enumerate(found)]
        text = "\n".join(blocks) if blocks else "# no tuples found"
    emit(text, output)
