"""
Provides shared utilities for the command-line interface:
- The `command_error` decorator for unified exception handling.
- The `parse_input()` function for splitting argv into command and options.
- CommandResult, the value every command handler returns.
- RunContext, the resolved config plus report writers handed to every handler.

Responsibilities:
- Contain only CLI parsing and error handling logic.
"""

import argparse
import functools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from heisenqc.commands_enum import Command
from heisenqc.config import SCHEMA_VERSION, RunConfig, config_hash
from heisenqc.errors import ConfigError, HeisenQCError, InvariantFailure
from heisenqc.storage_manager import save_csv, save_data, stamp

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass
class CommandResult:
    exit_code: int
    message: str
    files: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class RunContext:
    """The resolved config of one run and where its outputs go."""
    config: RunConfig
    filter: str | None = None

    @cached_property
    def config_hash(self) -> str:
        return config_hash(self.config)

    @property
    def out_dir(self) -> Path:
        return Path(self.config.output.directory)

    def write_report(self, name: str, report: dict) -> str:
        """Stamp and write a JSON report; returns the file name."""
        stamped = stamp(report, self.config.to_dict(), self.config_hash, SCHEMA_VERSION)
        return save_data(self.out_dir / name, stamped).name

    def write_table(self, name: str, header, rows) -> str:
        return save_csv(self.out_dir / name, header, rows, self.config_hash).name


def command_error(func):
    """Decorator mapping library errors to exit codes and messages."""

    @functools.wraps(func)
    def inner(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            return CommandResult(EXIT_USAGE, f"Configuration error: {e}")
        except InvariantFailure as e:
            return CommandResult(EXIT_FAILURE, f"Invariant failure: {e}")
        except HeisenQCError as e:
            log.debug("command %s failed", func.__name__, exc_info=True)
            return CommandResult(EXIT_FAILURE, f"{type(e).__name__}: {e}")

    return inner


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisenqc", add_help=False)
    parser.add_argument("command", nargs="?", default=Command.General.HELP.value)
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="DIR")
    parser.add_argument("--filter", metavar="NAME")
    return parser


def parse_input(argv):
    """Parse argv into the lower-cased command and the option namespace."""
    options = build_parser().parse_args(argv)
    command = options.command.strip().lower()
    if options.seed is not None and options.seed < 0:
        raise ConfigError(f"--seed must be non-negative, got {options.seed}")
    return command, options
