"""
Implements the `construct` command.

Builds φ = φ¹ − φ² from the configured map and density, and reports the
affine correction constants, the field at the origin, the discrepancy ζ on a
ball, growth envelopes, the strain budget and the λ comparability spread.
"""

import logging
from dataclasses import replace

import numpy as np

from heisenqc.commands_enum import Command
from heisenqc.config import build_map
from heisenqc.construct.bump import kernel_scale
from heisenqc.construct.kernel import lambda_comparability
from heisenqc.construct.potential import phi2_and_assemble, zeta
from heisenqc.construct.utils import format_construct_summary
from heisenqc.contact.field import field_from_potential, growth_constants
from heisenqc.contact.strain import strain
from heisenqc.core import EXIT_OK, CommandResult, RunContext, command_error
from heisenqc.group.quadrature import sample_ball
from heisenqc.metric.david_semmes import sample_pairs

log = logging.getLogger(__name__)

REPORT_FILE = "construct_report.json"

# every derivative of φ is a nested finite difference over all poles
STRAIN_RESOLUTION = 12
GROWTH_RADII = (1.0, 3.0, 10.0, 30.0, 100.0)
LAMBDA_PAIRS = 32


@command_error
def run_construct(ctx: RunContext) -> CommandResult:
    """Build the potential generated by (g, ψ) and write its report."""
    settings = ctx.config.construct
    cfg = ctx.config.quadrature
    g = build_map(settings.map, cfg)
    psi = settings.psi.build(cfg)
    phi = phi2_and_assemble(g, psi, cfg, n_nodes=settings.kernel_nodes)
    v = field_from_potential(phi)

    v0 = v(np.zeros((1, 3)))[0]
    points = sample_ball(np.zeros(3), settings.grid_radius, settings.grid_points, cfg)
    discrepancy = zeta(phi, points)
    c_phi, c_z = growth_constants(phi, GROWTH_RADII, n_angle=8, n_height=5)
    strain_cfg = replace(cfg, grid_resolution=min(cfg.grid_resolution, STRAIN_RESOLUTION))
    strain_report = strain(v, radius=settings.strain_radius, cfg=strain_cfg)

    P, Q = sample_pairs(LAMBDA_PAIRS, cfg)
    ratios = lambda_comparability(phi.kernel, P, Q)

    report = {
        "potential": phi.describe(),
        "psi_mass": float(np.sum(np.abs(psi.nodes()[1]))),
        "field_at_origin": v0.tolist(),
        "field_at_origin_norm": float(np.linalg.norm(v0)),
        "zeta": {
            "points": int(points.shape[0]),
            "radius": settings.grid_radius,
            "sup": float(np.max(np.abs(discrepancy))),
        },
        "growth_constants": {"phi": c_phi, "z": c_z, "radii": list(GROWTH_RADII)},
        "strain": strain_report.to_dict(),
        "lambda": {
            "pairs": LAMBDA_PAIRS,
            "min_ratio": float(ratios.min()),
            "max_ratio": float(ratios.max()),
            "spread": float(ratios.max() / ratios.min()),
            "identity_scale": kernel_scale(),
        },
    }
    log.info("construct: |v(0)|=%.3g sup|zeta|=%.6g", report["field_at_origin_norm"], report["zeta"]["sup"])
    return CommandResult(EXIT_OK, format_construct_summary(report), [ctx.write_report(REPORT_FILE, report)])


def register_construct_commands(commands):
    """Register commands in the main command dispatcher."""
    commands[Command.Experiments.CONSTRUCT] = run_construct
