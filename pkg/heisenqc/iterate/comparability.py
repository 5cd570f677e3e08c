"""
Comparison of J_F with the weight e^{2Λ} on a point grid, and weak
convergence of Jacobians along a sequence of maps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from heisenqc.construct.bump import SUPPORT, xi0
from heisenqc.flow.composed import as_composed
from heisenqc.group.point import as_points, dist
from heisenqc.group.quadrature import UNIT_BALL_VOLUME, QuadratureConfig, sample_ball, unit_ball_samples
from heisenqc.potential.logpot import LogPotential, eval_potential_many
from heisenqc.potential.measure import Measure

log = logging.getLogger(__name__)

GRID_RADIUS = 2.0
ATOM_EXCLUSION = 0.05


@dataclass(frozen=True, eq=False)
class ComparabilityReport:
    points: np.ndarray
    log_jacobian: np.ndarray
    potential: np.ndarray
    ratios: np.ndarray
    spread: float
    normalization: float
    grid_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "spread": self.spread,
            "normalization": self.normalization,
            "grid_meta": dict(self.grid_meta),
        }

    def rows(self) -> list[list[float]]:
        """(x, y, t, log J, Λ, ratio) per grid point."""
        return [
            [*p.tolist(), float(lj), float(lam), float(r)]
            for p, lj, lam, r in zip(self.points, self.log_jacobian, self.potential, self.ratios)
        ]


def comparability_grid(
    mu: Measure,
    cfg: QuadratureConfig | None = None,
    n: int = 1000,
    radius: float = GRID_RADIUS,
    exclusion: float = ATOM_EXCLUSION,
) -> tuple[np.ndarray, dict]:
    """Quasi-random points of B(radius) outside the exclusion balls around atoms."""
    cfg = cfg or QuadratureConfig()
    points = sample_ball(np.zeros(3), radius, n, cfg)
    if mu.atoms:
        atoms = np.array([a.location.to_list() for a in mu.atoms])
        near = np.any(dist(points[:, None, :], atoms[None, :, :]) < exclusion, axis=1)
        points = points[~near]
    meta = {"n": int(points.shape[0]), "radius": radius, "exclusion": exclusion, "seed": cfg.rng_seed}
    return points, meta


def comparability_report(
    F,
    potential: LogPotential,
    points,
    cfg: QuadratureConfig | None = None,
    grid_meta: dict | None = None,
) -> ComparabilityReport:
    """J_F·e^{−2Λ} normalized by its geometric mean; spread = max/min."""
    pts = np.atleast_2d(as_points(points))
    log_j = as_composed(F).log_jacobian(pts)
    lam, at_atom = eval_potential_many(potential, pts, cfg)
    keep = np.isfinite(lam) & ~at_atom
    log_ratio = log_j[keep] - 2.0 * lam[keep]
    center = float(np.mean(log_ratio)) if log_ratio.size else 0.0
    ratios = np.exp(log_ratio - center)
    spread = float(np.exp(log_ratio.max() - log_ratio.min())) if log_ratio.size else 1.0
    return ComparabilityReport(
        points=pts[keep],
        log_jacobian=log_j[keep],
        potential=lam[keep],
        ratios=ratios,
        spread=spread,
        normalization=float(np.exp(-center)),
        grid_meta=dict(grid_meta or {}),
    )


@dataclass(frozen=True)
class WeakJacobianReport:
    integrals: list[float]
    residuals: list[float]
    monotone: bool

    def to_dict(self) -> dict:
        return {"integrals": list(self.integrals), "residuals": list(self.residuals), "monotone": self.monotone}


def weak_jacobian_sequence(maps, xi=xi0, cfg: QuadratureConfig | None = None, n: int = 4096) -> WeakJacobianReport:
    """∫ξ·J_{F_m} over B(1/2) for each map, and |∫ξJ_{F_m} − ∫ξJ_{F_last}|."""
    cfg = cfg or QuadratureConfig()
    samples = unit_ball_samples(n, cfg) * np.array([SUPPORT, SUPPORT, SUPPORT ** 2])
    volume = UNIT_BALL_VOLUME * SUPPORT ** 4
    weights = xi(samples)
    integrals = [volume * float(np.mean(weights * np.exp(as_composed(F).log_jacobian(samples)))) for F in maps]
    last = integrals[-1] if integrals else 0.0
    residuals = [abs(value - last) for value in integrals]
    head = residuals[:-1]
    monotone = all(a >= b for a, b in zip(head, head[1:]))
    return WeakJacobianReport(integrals, residuals, monotone)
