"""
Logarithmic potentials Λ_μ(p) = −∫ log d(p, q) dμ(q), optionally precomposed with a map g.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from heisenqc.group.point import as_points, dist
from heisenqc.group.quadrature import UNIT_BALL_VOLUME, QuadratureConfig
from heisenqc.potential.measure import Measure

log = logging.getLogger(__name__)

# chunk size for the (points × nodes) distance table
_CHUNK = 2_000_000
# distances below this count as coincident with an atom
ATOM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PotentialValue:
    """Value of Λ at one point; ±inf only when the point sits on an atom."""
    value: float
    at_atom: bool = False

    def exp(self, beta: float = 1.0) -> float:
        """e^{βΛ}, mapping the signed infinities explicitly to 0 or ∞."""
        if np.isinf(self.value):
            return float("inf") if np.sign(self.value) * np.sign(beta) > 0 else 0.0
        return float(np.exp(beta * self.value))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class LogPotential:
    """Λ_μ, or Λ_μ∘g when a precomposition map is given."""
    measure: Measure
    precomposition: Any = None

    def __call__(self, points, cfg: QuadratureConfig | None = None) -> np.ndarray:
        values, _ = eval_potential_many(self, points, cfg)
        return values


def _density_self_distance(mu: Measure) -> float:
    # a cell seen from its own node: mean of log‖u‖ over B(ρ) is log ρ − 1/4
    if mu.density is None:
        return 0.0
    rho = (mu.density.cell_volume / UNIT_BALL_VOLUME) ** 0.25
    return rho * np.exp(-0.25)


def eval_potential_many(potential: LogPotential, points, cfg: QuadratureConfig | None = None):
    """Vectorized Λ at a batch of points.

    Returns (values, at_atom): values carry ±inf where a point coincides
    with atoms of nonzero net mass, at_atom marks those points.
    """
    pts = np.atleast_2d(as_points(points))
    if potential.precomposition is not None:
        pts = potential.precomposition.apply(pts)

    mu = potential.measure
    values = np.zeros(pts.shape[0])
    at_atom = np.zeros(pts.shape[0], dtype=bool)

    if mu.atoms:
        locations = np.array([a.location.to_list() for a in mu.atoms])
        masses = np.array([a.mass for a in mu.atoms])
        d = dist(pts[:, None, :], locations[None, :, :])
        hit = d <= ATOM_TOLERANCE
        with np.errstate(divide="ignore"):
            logs = np.where(hit, 0.0, np.log(np.where(hit, 1.0, d)))
        values -= logs @ masses
        singular_mass = np.where(hit, masses[None, :], 0.0).sum(axis=1)
        at_atom = np.any(hit, axis=1)
        values = np.where(at_atom & (singular_mass > 0), np.inf, values)
        values = np.where(at_atom & (singular_mass < 0), -np.inf, values)

    if mu.density is not None:
        nodes = mu.density.nodes()
        weights = mu.density.values.ravel() * mu.density.cell_volume
        keep = weights != 0.0
        nodes, weights = nodes[keep], weights[keep]
        floor = _density_self_distance(mu)
        chunk = max(1, _CHUNK // max(1, nodes.shape[0]))
        for start in range(0, pts.shape[0], chunk):
            block = pts[start:start + chunk]
            d = np.maximum(dist(block[:, None, :], nodes[None, :, :]), floor)
            finite = np.isfinite(values[start:start + chunk])
            values[start:start + chunk] = np.where(
                finite, values[start:start + chunk] - np.log(d) @ weights, values[start:start + chunk]
            )
    return values, at_atom


def eval_potential(potential: LogPotential, p, cfg: QuadratureConfig | None = None) -> PotentialValue:
    """Λ at a single point as a tagged value."""
    values, at_atom = eval_potential_many(potential, np.asarray(p, dtype=float).reshape(1, 3), cfg)
    return PotentialValue(float(values[0]), bool(at_atom[0]))


def lipschitz_quotients(potential: LogPotential, pairs: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """|Λ(p) − Λ(q)| / d(p, q) over sampled pairs."""
    p, q = pairs
    values_p, _ = eval_potential_many(potential, p)
    values_q, _ = eval_potential_many(potential, q)
    return np.abs(values_p - values_q) / dist(p, q)
