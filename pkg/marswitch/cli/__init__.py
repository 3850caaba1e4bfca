import sys
import json
import click

from marswitch import __version__

from marswitch.cli.main import main as _main
from marswitch.cli.helpers import helpers as _helpers


SOURCES = [_main, _helpers]
CONTEXT_SETTINGS = dict(help_option_names=['-h', '--help'])


@click.command(name='marswitch', cls=click.CommandCollection, sources=SOURCES,
               context_settings=CONTEXT_SETTINGS, invoke_without_command=True)
@click.option('--version', '-v', is_flag=True, help='Print version')
@click.option('--check-env', is_flag=True,
              help='Output the versions of marswitch and python as JSON.')
@click.pass_context
def marswitch(ctx, version=False, check_env=False):
    """Command line interface to marswitch"""
    if version:
        print(__version__)
        raise SystemExit(0)
    if check_env:
        output = {
            'version': __version__,
            'python_version': sys.version.split()[0],
        }
        json.dump(output, sys.stdout)
        raise SystemExit(0)
    if ctx.invoked_subcommand is None:
        print(marswitch.get_help(ctx))


if __name__ == '__main__':
    marswitch()
