"""
Implements the `flow` command.

Integrates the contact field of a catalogue potential from the configured
start point, dumps the trajectory with its horizontal differential, and
reports the three Jacobian routes, the strain budget and the dilatation at
a batch of base points.
"""

import logging

import numpy as np

from heisenqc.commands_enum import Command
from heisenqc.contact.strain import strain
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.flow.dilatation import analytic_dilatation, contact_residual, dilatation
from heisenqc.flow.integrator import FlowMap, integration_error, trajectory_rows
from heisenqc.flow.jacobian import jacobian_volume
from heisenqc.flow.utils import format_flow_summary
from heisenqc.group.point import gauge
from heisenqc.group.quadrature import unit_ball_samples

log = logging.getLogger(__name__)

REPORT_FILE = "flow_report.json"
TRAJECTORY_FILE = "trajectory.csv"
TRAJECTORY_HEADER = ["sigma", "x", "y", "t", "m11", "m12", "m21", "m22"]

# base points stay off the origin, where logarithmic potentials are singular
BASE_INNER_RADIUS = 0.05
# the volume route is Monte Carlo per point; run it on the first few only
VOLUME_POINTS = 3


def base_points(n: int, cfg) -> np.ndarray:
    points = unit_ball_samples(2 * n + 16, cfg)
    return points[gauge(points) > BASE_INNER_RADIUS][:n]


def _ratio_spread(*routes: np.ndarray) -> float:
    stacked = np.stack(routes)
    return float(np.max(stacked.max(axis=0) / stacked.min(axis=0)) - 1.0)


@command_error
def run_flow(ctx: RunContext) -> CommandResult:
    """Integrate the configured flow and write the report and trajectory."""
    settings = ctx.config.flow
    cfg = ctx.config.quadrature
    v = settings.contact_field(cfg)
    s, step = settings.time, settings.step
    flow_map = FlowMap(v, s, steps=settings.steps)

    rows = trajectory_rows(v, settings.start, s, steps=settings.steps)
    points = base_points(settings.base_points, cfg)

    A = flow_map.horizontal_differential(points)
    det_route = np.linalg.det(A) ** 2
    divergence_route = np.exp(flow_map.log_jacobian(points))
    jacobians = {
        "points": points.tolist(),
        "determinant": det_route.tolist(),
        "variational": divergence_route.tolist(),
        "spread": _ratio_spread(det_route, divergence_route),
    }
    if settings.volume_check:
        head = points[:VOLUME_POINTS]
        volume = [jacobian_volume(flow_map, p, cfg=cfg) for p in head]
        volume_route = np.array([vj.value for vj in volume])
        jacobians["volume"] = [vj.to_dict() for vj in volume]
        jacobians["spread_with_volume"] = _ratio_spread(
            det_route[:VOLUME_POINTS], divergence_route[:VOLUME_POINTS], volume_route
        )

    strain_report = strain(v, radius=settings.strain_radius, inner_radius=BASE_INNER_RADIUS, cfg=cfg)
    K_hat = analytic_dilatation(flow_map, points)
    bound = float(np.exp(strain_report.sup_estimate * abs(s)))
    metric = dilatation(flow_map, points[:VOLUME_POINTS], cfg=cfg)

    report = {
        "potential": settings.potential,
        "time": s,
        "steps": settings.steps,
        "step": step,
        "start": list(settings.start),
        "endpoint": rows[-1][1:4],
        "integration_error": integration_error(v, settings.start, s, steps=settings.steps),
        "jacobian": jacobians,
        "strain": strain_report.to_dict(),
        "dilatation": {
            "analytic_max": float(np.max(K_hat)),
            "metric": metric.to_dict(),
            "bound": bound,
            "bound_ratio": float(np.max(K_hat)) / bound,
        },
        "contact_residual": float(np.max(contact_residual(flow_map, points, cfg))),
    }
    log.info("flow %s: %d trajectory rows, K=%.6g", settings.potential, len(rows), report["dilatation"]["analytic_max"])

    files = [
        ctx.write_report(REPORT_FILE, report),
        ctx.write_table(TRAJECTORY_FILE, TRAJECTORY_HEADER, rows),
    ]
    return CommandResult(EXIT_OK, format_flow_summary(report), files)


def register_flow_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.FLOW] = run_flow
