"""
Weights ω, the measure ν = ω·Lebesgue and the David-Semmes quasimetric
d_ω(p, q) = ν(B(p, d) ∪ B(q, d))^{1/4}, d = d(p, q).

ν over the union is sampled on B(p, 2d), which holds both balls, with the
shared unit-ball samples so that estimates at different pairs and scales
use the same random numbers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from heisenqc.errors import DomainError, EvaluationError
from heisenqc.flow.composed import as_composed
from heisenqc.group.point import as_points, dilate, dist, mul
from heisenqc.group.quadrature import STREAM_PAIRS, UNIT_BALL_VOLUME, QuadratureConfig, sample_ball
from heisenqc.potential.logpot import LogPotential, eval_potential_many

log = logging.getLogger(__name__)

MIN_SEPARATION = 0.05


class WeightField:
    """A continuous weight ω ≥ 0 with a record of where it came from."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], provenance: str = "analytic", constant: float | None = None):
        self._fn = fn
        self.provenance = provenance
        self.constant_value = constant

    @property
    def is_constant(self) -> bool:
        return self.constant_value is not None

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(as_points(points))
        values = np.asarray(self._fn(pts), dtype=float).reshape(pts.shape[0])
        if not np.all(np.isfinite(values)):
            raise EvaluationError(f"Weight {self.provenance} is not finite at {int(np.sum(~np.isfinite(values)))} points")
        if np.any(values < 0):
            raise DomainError(f"Weight {self.provenance} takes negative values")
        return values

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightField":
        if c < 0:
            raise DomainError(f"Weight must be non-negative, got {c}")
        return cls(lambda p: np.full(p.shape[0], float(c)), f"constant({c:g})", float(c))

    @classmethod
    def analytic(cls, fn, name: str = "analytic") -> "WeightField":
        return cls(fn, name)

    @classmethod
    def from_jacobian(cls, F) -> "WeightField":
        """ω = J_F; constant for words of dilations and translations."""
        Fmap = as_composed(F)
        if Fmap.has_constant_jacobian:
            return cls.constant(float(np.exp(Fmap.constant_log_jacobian())))
        return cls(lambda p: np.exp(Fmap.log_jacobian(p)), "jacobian")

    @classmethod
    def from_potential(cls, potential: LogPotential) -> "WeightField":
        """ω = e^{2Λ}."""

        def fn(p):
            values, _ = eval_potential_many(potential, p)
            with np.errstate(over="ignore"):
                return np.exp(2.0 * values)

        return cls(fn, "exp(2*potential)")

    def tabulated(self, grid) -> "WeightField":
        """Linear interpolation of ω on a BoxGrid; exact evaluation outside it."""
        if self.is_constant:
            return self
        table = self(grid.nodes()).reshape(grid.shape())
        interp = RegularGridInterpolator(grid.axes(), table, method="linear")

        def fn(p):
            inside = grid.contains(p)
            out = np.empty(p.shape[0])
            out[inside] = interp(p[inside])
            if not np.all(inside):
                out[~inside] = self._fn(p[~inside])
            return out

        return WeightField(fn, f"tabulated({self.provenance})")

    def __repr__(self) -> str:
        return f"WeightField({self.provenance!r})"


def nu_ball(omega: WeightField, p, r: float, cfg: QuadratureConfig) -> float:
    """ν(B(p, r))."""
    if omega.is_constant:
        return omega.constant_value * UNIT_BALL_VOLUME * r ** 4
    return UNIT_BALL_VOLUME * r ** 4 * float(np.mean(omega(sample_ball(p, r, cfg.mc_samples, cfg))))


def david_semmes(p, q, omega: WeightField, cfg: QuadratureConfig | None = None) -> float:
    """ν(B(p, d) ∪ B(q, d))^{1/4}."""
    cfg = cfg or QuadratureConfig()
    p = np.asarray(as_points(p), dtype=float).reshape(3)
    q = np.asarray(as_points(q), dtype=float).reshape(3)
    d = float(dist(p, q))
    if d == 0.0:
        return 0.0
    samples = sample_ball(p, 2.0 * d, cfg.mc_samples, cfg)
    union = (dist(samples, p) < d) | (dist(samples, q) < d)
    weights = np.where(union, omega(samples), 0.0) if not omega.is_constant else union * omega.constant_value
    nu = UNIT_BALL_VOLUME * (2.0 * d) ** 4 * float(np.mean(weights))
    return nu ** 0.25


def doubling_quotients(omega: WeightField, centers, radii, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """ν(B(p, 2r)) / ν(B(p, r)) for every center and radius, shape (centers, radii)."""
    cfg = cfg or QuadratureConfig()
    centers = np.atleast_2d(as_points(centers))
    out = np.empty((centers.shape[0], len(radii)))
    for i, p in enumerate(centers):
        for j, r in enumerate(radii):
            out[i, j] = nu_ball(omega, p, 2.0 * r, cfg) / nu_ball(omega, p, r, cfg)
    return out


def quasimetric_constant(omega: WeightField, triples, cfg: QuadratureConfig | None = None) -> float:
    """max d_ω(p, q) / (d_ω(p, u) + d_ω(u, q)) over triples (p, u, q)."""
    worst = 0.0
    for p, u, q in triples:
        direct = david_semmes(p, q, omega, cfg)
        via = david_semmes(p, u, omega, cfg) + david_semmes(u, q, omega, cfg)
        if via > 0:
            worst = max(worst, direct / via)
    return worst


def sample_pairs(
    n: int,
    cfg: QuadratureConfig | None = None,
    radius: float = 2.0,
    min_separation: float = MIN_SEPARATION,
) -> tuple[np.ndarray, np.ndarray]:
    """n quasi-random pairs in B(radius)² with d(p, q) ≥ min_separation."""
    cfg = cfg or QuadratureConfig()
    rng = cfg.rng(STREAM_PAIRS)
    pool = sample_ball(np.zeros(3), radius, max(4 * n, 64), cfg)
    ps, qs = [], []
    while len(ps) < n:
        i, j = rng.integers(0, pool.shape[0], size=2)
        if dist(pool[i], pool[j]) >= min_separation:
            ps.append(pool[i])
            qs.append(pool[j])
    return np.array(ps), np.array(qs)


@dataclass(frozen=True)
class TripleBatch:
    p: np.ndarray
    u: np.ndarray
    q: np.ndarray

    def __iter__(self):
        return iter(zip(self.p, self.u, self.q))


def sample_triples(n: int, cfg: QuadratureConfig | None = None, radius: float = 2.0) -> TripleBatch:
    """Triples (p, u, q) with u between p and q in scale: u = p ⋆ δ_{1/2}(p⁻¹ ⋆ q) perturbed."""
    cfg = cfg or QuadratureConfig()
    p, q = sample_pairs(n, cfg, radius)
    mid = mul(p, dilate(0.5, mul(-p, q)))
    jitter = 0.25 * dist(p, q)
    offsets = sample_ball(np.zeros(3), 1.0, n, cfg)
    u = mul(mid, dilate(jitter, offsets))
    return TripleBatch(p, u, q)
