"""
Implements the `metric` command.

Compares ρ(F(p), F(q)) with the weighted distances ρ_ω and d_ω over a pair
batch, where ω is the Jacobian of the configured map, a constant, or
e^{2Λ} for a configured measure.
"""

import logging

from heisenqc.commands_enum import Command
from heisenqc.config import MetricSettings, build_map
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.metric.david_semmes import WeightField
from heisenqc.metric.suite import CSV_HEADER, comparability_suite
from heisenqc.metric.utils import format_metric_summary
from heisenqc.potential.logpot import LogPotential

log = logging.getLogger(__name__)

REPORT_FILE = "metric_report.json"
TABLE_FILE = "comparability.csv"


def weight_field(settings: MetricSettings, F, cfg) -> WeightField:
    if settings.weight == "constant":
        return WeightField.constant(settings.weight_constant)
    if settings.weight == "potential":
        return WeightField.from_potential(LogPotential(settings.weight_measure.build(cfg)))
    return WeightField.from_jacobian(F)


@command_error
def run_metric(ctx: RunContext) -> CommandResult:
    """Run the comparability suite and write the report and pair table."""
    settings = ctx.config.metric
    cfg = ctx.config.quadrature
    F = build_map(settings.map, cfg)
    omega = weight_field(settings, F, cfg)
    suite = comparability_suite(
        F,
        omega,
        cfg=cfg,
        opt=settings.optimizer(ctx.config.seed),
        n_pairs=settings.pairs,
        n_triples=settings.triples,
        doubling_radii=settings.doubling_radii,
    )
    report = {"map": F.describe(), "weight": settings.weight, **suite.to_dict()}
    log.info("metric: %d pairs, L=%.6g", settings.pairs, suite.bilipschitz_constant)
    files = [
        ctx.write_report(REPORT_FILE, report),
        ctx.write_table(TABLE_FILE, CSV_HEADER, suite.rows()),
    ]
    return CommandResult(EXIT_OK, format_metric_summary(report), files)


def register_metric_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.METRIC] = run_metric
