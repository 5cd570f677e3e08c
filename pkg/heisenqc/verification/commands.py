"""
Implements the `verify` command.

Runs the invariant suite (optionally one group selected with --filter),
writes verify_report.json and fails with exit code 1 when any check fails.
The report is written before the failure is raised.
"""

from heisenqc.commands_enum import Command
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.errors import InvariantFailure
from heisenqc.validators.fields import validate_filter
from heisenqc.verification.suites import SUITES, run_suite
from heisenqc.verification.utils import format_results

REPORT_FILE = "verify_report.json"


@command_error
def run_verify(ctx: RunContext) -> CommandResult:
    """Run the selected invariant groups and write the report."""
    only = validate_filter(ctx.filter, SUITES)
    results = run_suite(ctx.config.verify, ctx.config.quadrature, only)
    failed = [r.name for r in results if not r.passed]
    report = {
        "filter": only,
        "groups": sorted({r.group for r in results}),
        "passed": not failed,
        "failed": failed,
        "checks": [r.to_dict() for r in results],
    }
    written = ctx.write_report(REPORT_FILE, report)
    if failed:
        raise InvariantFailure(f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}")
    return CommandResult(EXIT_OK, format_results(results), [written])


def register_verify_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.VERIFY] = run_verify
