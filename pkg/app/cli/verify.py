from typing import Optional, Tuple

import click

from app.cli.options import emit, format_option, params_options
from app.cli.report import finish, render
from app.core.dependencies import get_check_middleware, resolve_params
from app.services.verification import CHECK_IDS, run_verification


@click.command("verify")
@params_options
@click.option(
    "--check",
    "checks",
    multiple=True,
    type=click.Choice(CHECK_IDS),
    help="Run only this check (repeatable); prerequisites run silently.",
)
@format_option
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def verify(
    preset: Optional[str],
    params_file: Optional[str],
    precision: Optional[int],
    z: Optional[str],
    checks: Tuple[str, ...],
    output_format: str,
    output: Optional[str],
):
    """
    Verify the deformation for a parameter tuple.

    Exit code 0 when every selected check passes, 1 when any fails,
    2 on bad input.
    """
    params = resolve_params(preset, params_file, precision, z)
    result = run_verification(params, checks or None, middleware=get_check_middleware())
    emit(render(result, output_format), output)
    finish(result)
