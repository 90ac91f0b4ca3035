import logging

import click

from expcorr.commands import corr, couple, fcorr, fit, residual, synth

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


@click.group()
@click.help_option("--help", "-h")
@click.version_option()
@click.option("--verbose", "-v", count=True, help="Log more (-v info, -vv debug) to stderr.")
def cli(verbose: int) -> None:
    """Experimental correlation of spatial samples."""
    logging.basicConfig(
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


cli.add_command(corr, "corr")
cli.add_command(fit, "fit")
cli.add_command(fcorr, "fcorr")
cli.add_command(couple, "couple")
cli.add_command(synth, "synth")
cli.add_command(residual, "residual")

if __name__ == "__main__":
    cli()
