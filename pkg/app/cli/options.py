import click

from app.services.params import PRESETS

OUTPUT_FORMATS = ("text", "json")


def params_options(f):
    """--preset / --params-file / --precision / --z shared by every command"""
    f = click.option("--z", "z", default=None, help="Override the parameter z (text grammar).")(f)
    f = click.option(
        "--precision",
        type=click.IntRange(1, 256),
        default=None,
        help="Series precision N for t-expansions.",
    )(f)
    f = click.option(
        "--params-file",
        type=click.Path(dir_okay=False),
        default=None,
        help="key=value file with a, b, c, d, w, z, precision.",
    )(f)
    f = click.option(
        "--preset",
        type=click.Choice(sorted(PRESETS)),
        default=None,
        help="Named parameter tuple (default: example).",
    )(f)
    return f


def format_option(f):
    return click.option(
        "--format",
        "output_format",
        type=click.Choice(OUTPUT_FORMATS),
        default="text",
        show_default=True,
    )(f)


def emit(text: str, output: str = None) -> None:
    """Write to --output when given, stdout otherwise"""
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        click.echo(f"wrote {output}", err=True)
    else:
        click.echo(text)
