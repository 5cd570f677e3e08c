"""
Entry point for the heisenqc experiment driver.

Responsibilities:
- Configure logging from the HEISENQC_LOG_LEVEL environment variable.
- Parse argv using `parse_input()` from `heisenqc.core`.
- Load the JSON config, apply flag overrides and route the command to its
  handler (verification, flow, potential, construct, iterate or metric module).
- Print the handler's summary and return its exit code.
"""
import html
import logging
import os
import sys

from prompt_toolkit import HTML, print_formatted_text

from heisenqc.commands_enum import COMMAND_HELP, Command
from heisenqc.config import RunConfig
from heisenqc.construct.commands import register_construct_commands
from heisenqc.core import EXIT_USAGE, CommandResult, RunContext, parse_input
from heisenqc.errors import ConfigError
from heisenqc.flow.commands import register_flow_commands
from heisenqc.iterate.commands import register_iterate_commands
from heisenqc.metric.commands import register_metric_commands
from heisenqc.potential.commands import register_potential_commands
from heisenqc.storage_manager import load_data
from heisenqc.verification.commands import register_verify_commands

# Command registry (populated by register_* functions)
COMMANDS = {}

register_verify_commands(COMMANDS)
register_flow_commands(COMMANDS)
register_potential_commands(COMMANDS)
register_construct_commands(COMMANDS)
register_iterate_commands(COMMANDS)
register_metric_commands(COMMANDS)

VALUE_TO_ENUM = {cmd.value: cmd for group in (Command.Experiments, Command.General) for cmd in group}


def configure_logging():
    """Root logger on stderr; level from HEISENQC_LOG_LEVEL, WARNING on bad input."""
    level_env = os.environ.get("HEISENQC_LOG_LEVEL", "WARNING")
    level = logging.getLevelName(level_env.strip().upper())
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def echo(text: str, style: str | None = None, file=None):
    """Print text through prompt_toolkit, escaped so report values never parse as markup."""
    body = html.escape(text)
    markup = f"<{style}>{body}</{style}>" if style else body
    print_formatted_text(HTML(markup), file=file)


def show_help():
    """Display help with all commands, parameters, and descriptions."""
    echo("\n" + "=" * 70)
    echo("📚 heisenqc - Available Commands", "b")
    echo("=" * 70)

    echo("\n🔬 Experiments:")
    for cmd in Command.Experiments:
        echo(COMMAND_HELP[cmd].format(cmd.value, width=45))

    echo("\n⚙️ General:")
    for cmd in Command.General:
        echo(COMMAND_HELP[cmd].format(cmd.value, width=45))

    echo("\n" + "=" * 70)
    echo("Options:")
    echo("  --config PATH  JSON run configuration (defaults when omitted)")
    echo("  --seed N       Override the seed of every random stream")
    echo("  --out DIR      Directory for reports (default: out)")
    echo("  --filter NAME  Run one verification group only")
    echo("=" * 70 + "\n")


def load_config(options) -> RunConfig:
    data = load_data(options.config) if options.config else {}
    if not isinstance(data, dict):
        raise ConfigError("Config file must hold a JSON object")
    return RunConfig.from_dict(data).with_overrides(seed=options.seed, out=options.out)


def report(result: CommandResult):
    if result.exit_code == 0:
        echo(result.message)
        for name in result.files:
            echo(f"💾 {name}", "ansigreen")
    else:
        echo(result.message, "ansired", file=sys.stderr)


def main(argv=None) -> int:
    configure_logging()
    try:
        command, options = parse_input(sys.argv[1:] if argv is None else argv)
        cmd_enum = VALUE_TO_ENUM.get(command)
        if cmd_enum is None:
            echo(f"Unknown command '{command}'. Run 'help' to see available commands.", "ansired", file=sys.stderr)
            return EXIT_USAGE
        if cmd_enum == Command.General.HELP:
            show_help()
            return 0
        context = RunContext(load_config(options), filter=options.filter)
    except ConfigError as e:
        echo(f"Configuration error: {e}", "ansired", file=sys.stderr)
        return EXIT_USAGE

    result = COMMANDS[cmd_enum](context)
    report(result)
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
