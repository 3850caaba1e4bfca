import click
from pathlib import Path
from collections.abc import Iterable

from marswitch.config import set_setting
from marswitch.config import get_setting
from marswitch.config import get_global_config_file
from marswitch.config import GLOBAL_CONFIG_FILE_MODE


helpers = click.Group(
    name='Helpers',
    help="Helpers to configure ``marswitch``."
)


@helpers.group(
    help="Configuration helper for marswitch. Settings are read from the "
    "environment (MARSWITCH_<NAME>), then from the global config file.",
    invoke_without_command=True
)
@click.option('--config-file', '-c', 'config_file', metavar='<config.yml>',
              type=click.Path(dir_okay=False), default=None,
              help="Config file to use instead of the global one.")
@click.pass_context
def config(ctx, config_file):
    ctx.ensure_object(dict)

    if config_file is None:
        config_file = get_global_config_file()
    config_file = Path(config_file)
    if ctx.invoked_subcommand is None:
        print(f"Config file is: {config_file.resolve()}")

    ctx.obj['config'] = config_file


@config.command(help="Set value of setting <name> to <val>.\n\n"
                "Multiple values can be provided as separate arguments. "
                "This will generate a list of values in the config file.")
@click.argument("name", metavar='<name>', type=str)
@click.argument("values", metavar='<val>', type=str,
                nargs=-1, required=True)
@click.pass_context
def set(ctx, name, values):
    config = ctx.obj['config']
    if not config.exists():
        config.parent.mkdir(exist_ok=True, parents=True)
        config.touch(mode=GLOBAL_CONFIG_FILE_MODE)

    if len(values) == 1:
        values = values[0]

    set_setting(name, values, config_file=config)


@config.command(help="Get config value for setting <name>.")
@click.argument("name", metavar='<name>', type=str)
@click.pass_context
def get(ctx, name):
    config = ctx.obj['config']
    value = get_setting(name, config_file=config)
    if not isinstance(value, str) and isinstance(value, Iterable):
        value = ' '.join(value)
    print(f"{name}: {value}")
