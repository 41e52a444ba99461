import click

from app.core.config import settings
from app.services.verification import TOOL_NAME

from .params import params as params_group
from .report import report as report_command
from .verify import verify as verify_command


@click.group(help=f"{settings.APP_NAME}: exact checks for the deformation [kQ8]_t")
@click.version_option(settings.APP_VERSION, prog_name=TOOL_NAME)
def cli():
    pass


cli.add_command(verify_command)
cli.add_command(params_group)
cli.add_command(report_command)
