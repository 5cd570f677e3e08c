"""
Implements the `potential` command.

Evaluates the log potential of the configured measure at quasi-random points
of a ball, checks admissibility, and measures how fast the smoothed and the
restricted measures approach it.
"""

import logging
from dataclasses import replace

import numpy as np

from heisenqc.commands_enum import Command
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.group.quadrature import sample_ball
from heisenqc.potential.convergence import regularization_errors, restriction_errors
from heisenqc.potential.logpot import LogPotential, eval_potential_many
from heisenqc.potential.measure import Measure, is_admissible
from heisenqc.potential.utils import format_potential_summary

log = logging.getLogger(__name__)

REPORT_FILE = "potential_report.json"
VALUES_FILE = "potential_values.csv"
VALUES_HEADER = ["x", "y", "t", "potential", "exp_beta_potential", "at_atom"]


@command_error
def run_potential(ctx: RunContext) -> CommandResult:
    """Evaluate Λ_μ on a ball and write the report and value table."""
    settings = ctx.config.potential
    cfg = ctx.config.quadrature
    mu = settings.measure.build(cfg)

    points = sample_ball(np.zeros(3), settings.grid_radius, settings.grid_points, cfg)
    values, at_atom = eval_potential_many(LogPotential(mu), points, cfg)
    with np.errstate(over="ignore"):
        weights = np.exp(settings.beta * values)
    finite = values[np.isfinite(values)]

    # the convergence ladders act on the atoms before any smoothing
    atoms = Measure(atoms=settings.measure.atoms)
    smoothing_cfg = replace(cfg, grid_resolution=settings.measure.grid_resolution)
    report = {
        "measure": settings.measure.to_dict(),
        "admissibility": is_admissible(mu).to_dict(),
        "signed_mass": mu.signed_mass(),
        "grid": {"points": int(points.shape[0]), "radius": settings.grid_radius},
        "values": {
            "min": float(finite.min()) if finite.size else None,
            "max": float(finite.max()) if finite.size else None,
            "at_atom": int(at_atom.sum()),
        },
        "beta": settings.beta,
        "regularization": {
            "ladder": list(settings.smoothing_ladder),
            "errors": regularization_errors(atoms, settings.beta, settings.smoothing_ladder, smoothing_cfg),
        },
        "restriction": {
            "ladder": list(settings.restriction_ladder),
            "errors": restriction_errors(atoms, settings.beta, settings.restriction_ladder, cfg),
        },
    }
    log.info("potential: %d points, %d at atoms", points.shape[0], int(at_atom.sum()))

    rows = [
        [*p.tolist(), float(value), float(weight), int(hit)]
        for p, value, weight, hit in zip(points, values, weights, at_atom)
    ]
    files = [
        ctx.write_report(REPORT_FILE, report),
        ctx.write_table(VALUES_FILE, VALUES_HEADER, rows),
    ]
    return CommandResult(EXIT_OK, format_potential_summary(report), files)


def register_potential_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.POTENTIAL] = run_potential
