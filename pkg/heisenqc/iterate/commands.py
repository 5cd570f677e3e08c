"""
Implements the `iterate` command.

Runs the composition scheme for the configured m, writes the step record and
the comparability ratios on the sample grid, and attaches the predicted
dilatation budget. An aborted run still writes the steps it completed.

With `iteration.sweep` set, the scheme runs once per listed m; the report
and ratios are those of the largest m, plus a `sweep` section with the
spread trend and the weak Jacobian residuals.
"""

import logging

from heisenqc.commands_enum import Command
from heisenqc.config import build_map
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.errors import BoundDivergesError, IterationAborted
from heisenqc.group.point import Point
from heisenqc.iterate.budget import dilatation_budget, size_threshold
from heisenqc.iterate.scheme import IterationConfig, IterationReport, iterate, sweep
from heisenqc.iterate.utils import format_iteration_summary

log = logging.getLogger(__name__)

REPORT_FILE = "iterate_report.json"
RATIOS_FILE = "iterate_ratios.csv"
RATIOS_HEADER = ["x", "y", "t", "log_jacobian", "potential", "ratio"]


def iteration_config(ctx: RunContext) -> IterationConfig:
    settings = ctx.config.iteration
    cfg = ctx.config.quadrature
    return IterationConfig(
        m=settings.m,
        g=build_map(settings.map, cfg),
        psi=settings.psi.build(cfg),
        p0=Point(*settings.p0),
        flow_steps=settings.flow_steps,
        table=settings.table(),
        jacobian_table=settings.jacobian_table(),
        kernel_nodes=settings.kernel_nodes,
        grid_points=settings.grid_points,
        quadrature=cfg,
    )


def _budget(ctx: RunContext) -> dict:
    budget = ctx.config.iteration.budget
    try:
        return dilatation_budget(budget).to_dict()
    except BoundDivergesError as e:
        log.warning("dilatation budget: %s", e)
        return {"epsilon": size_threshold(budget), "epsilon_prime": budget.epsilon_prime, "error": str(e)}


def _write(ctx: RunContext, report: IterationReport, aborted: str | None, extra: dict | None = None) -> list[str]:
    data = {**report.to_dict(), "budget": _budget(ctx), "aborted": aborted, **(extra or {})}
    files = [ctx.write_report(REPORT_FILE, data)]
    if report.comparability is not None:
        files.append(ctx.write_table(RATIOS_FILE, RATIOS_HEADER, report.comparability.rows()))
    return files


@command_error
def run_iterate(ctx: RunContext) -> CommandResult:
    """Run the scheme and write the report and ratio table."""
    cfg = iteration_config(ctx)
    ms = ctx.config.iteration.sweep
    extra = None
    try:
        if ms:
            _, sweep_report = sweep(cfg, ms)
            report = sweep_report.reports[-1]
            extra = {"sweep": sweep_report.to_dict()}
        else:
            _, report = iterate(cfg)
    except IterationAborted as e:
        if e.report is not None:
            _write(ctx, e.report, str(e))
        raise
    files = _write(ctx, report, None, extra)
    return CommandResult(EXIT_OK, format_iteration_summary(report), files)


def register_iterate_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.ITERATE] = run_iterate
