"""
Bow-tie Decomposition - Command-line entry point
Exit status: 0 success, 1 input/parse error, 2 resource exhaustion, 3 contract violation
"""
import logging
import sys

import click

from bowtie.errors import BowtieError, ResourceExhaustedError
from bowtie.cli.commands import COMMANDS
from config import get_config

logger = logging.getLogger('bowtie')


def configure_logging(settings):
    """Send package logs to stderr at the configured level"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(settings.LOG_FORMAT))
    logger.handlers[:] = [handler]
    logger.setLevel(settings.LOG_LEVEL)
    logger.propagate = False


def create_cli(config_name=None):
    """CLI factory"""
    settings = get_config(config_name)
    configure_logging(settings)

    @click.group(context_settings={'help_option_names': ['-h', '--help']})
    @click.pass_context
    def cli(ctx):
        """Bow-tie macrostructure of directed graphs"""
        ctx.obj = settings

    # Register commands
    for command in COMMANDS:
        cli.add_command(command)

    return cli


def main(argv=None, config_name=None) -> int:
    """Run one command and return the process exit status"""
    try:
        cli = create_cli(config_name)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        return 1

    try:
        result = cli.main(args=argv, prog_name='bowtie', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except BowtieError as e:
        click.echo(f"error: {e}", err=True)
        return e.exit_code
    except MemoryError:
        error = ResourceExhaustedError('run')
        click.echo(f"error: {error}", err=True)
        return error.exit_code

    # --help and friends return an exit status instead of a result
    if not isinstance(result, dict):
        return int(result or 0)

    click.echo(result['message'], err=True)
    return result.get('exit_code', 0 if result['success'] else 3)


if __name__ == '__main__':
    sys.exit(main())
