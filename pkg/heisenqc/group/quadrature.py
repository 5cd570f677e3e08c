"""
Quadrature over gauge balls and spheres.

Responsibilities:
- QuadratureConfig: seed, sample counts, grid resolution, finite-difference step.
- Low-discrepancy samples of the unit gauge ball, shared across callers so
  that estimates at different centers and radii use common random numbers.
- Ball volumes by membership counting in a bounding box.
- Polar integration ∫ f = ∫_{S(1)} ∫_0^∞ f(δ_r q) r³ dr dσ(q), with σ realized
  by projecting annulus samples onto S(1) along dilations.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import qmc

from heisenqc.errors import ConfigError, DomainError, IntegrabilityError
from heisenqc.group.point import as_points, dilate, dist, gauge, mul

log = logging.getLogger(__name__)

UNIT_BALL_VOLUME = np.pi ** 2 / 2.0

# random stream identifiers
STREAM_BALL = 1
STREAM_ANNULUS = 2
STREAM_BOX = 3
STREAM_PAIRS = 4
STREAM_KERNEL = 5
STREAM_PERTURB = 6


@dataclass(frozen=True)
class QuadratureConfig:
    """Sampling and differencing parameters; every random draw derives from rng_seed."""
    rng_seed: int = 0
    mc_samples: int = 20000
    grid_resolution: int = 32
    fd_step: float = 1e-4

    def __post_init__(self):
        if int(self.mc_samples) < 1:
            raise ConfigError(f"mc_samples must be at least 1, got {self.mc_samples}")
        if int(self.grid_resolution) < 2:
            raise ConfigError(f"grid_resolution must be at least 2, got {self.grid_resolution}")
        if not (self.fd_step > 0 and np.isfinite(self.fd_step)):
            raise ConfigError(f"fd_step must be positive, got {self.fd_step}")

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator for one purpose, derived from the seed."""
        return np.random.default_rng([int(self.rng_seed), int(stream)])

    def sobol(self, dimension: int, n: int, stream: int = 0) -> np.ndarray:
        """Scrambled Sobol points in [0, 1)^dimension (n rounded up to a power of two)."""
        m = max(1, int(np.ceil(np.log2(max(n, 2)))))
        engine = qmc.Sobol(d=dimension, scramble=True, seed=self.rng(stream))
        return engine.random_base2(m)[:n]

    def with_samples(self, mc_samples: int) -> "QuadratureConfig":
        return replace(self, mc_samples=int(mc_samples))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureConfig":
        return cls(**{k: data[k] for k in ("rng_seed", "mc_samples", "grid_resolution", "fd_step") if k in data})


@lru_cache(maxsize=16)
def _unit_ball_cache(n: int, seed: int) -> np.ndarray:
    cfg = QuadratureConfig(rng_seed=seed)
    # box [-1,1]^3 holds B(1); acceptance is about 0.62
    draws = 2.0 * cfg.sobol(3, int(np.ceil(n / 0.55)) + 64, STREAM_BALL) - 1.0
    inside = draws[gauge(draws) < 1.0]
    while inside.shape[0] < n:
        extra = 2.0 * cfg.rng(STREAM_BALL).random((n, 3)) - 1.0
        inside = np.concatenate([inside, extra[gauge(extra) < 1.0]])
    inside = inside[:n]
    inside.setflags(write=False)
    return inside


def unit_ball_samples(n: int, cfg: QuadratureConfig) -> np.ndarray:
    """n points uniformly distributed in B(1); identical for identical (n, seed)."""
    return _unit_ball_cache(int(n), int(cfg.rng_seed))


def sample_ball(center, r: float, n: int, cfg: QuadratureConfig) -> np.ndarray:
    """Uniform samples of B(center, r) as center ⋆ δ_r(w) for fixed w in B(1)."""
    if r <= 0:
        raise DomainError(f"Ball radius must be positive, got {r}")
    return mul(as_points(center), dilate(r, unit_ball_samples(n, cfg)))


@lru_cache(maxsize=16)
def _sphere_cache(n: int, seed: int) -> np.ndarray:
    cfg = QuadratureConfig(rng_seed=seed)
    inner = 0.95 ** 4
    u = cfg.sobol(3, int(np.ceil(n / 0.55)) + 64, STREAM_ANNULUS)
    draws = 2.0 * u - 1.0
    norms = gauge(draws)
    keep = draws[(norms < 1.0) & (norms ** 4 > inner)]
    while keep.shape[0] < n:
        extra = 2.0 * cfg.rng(STREAM_ANNULUS).random((4 * n, 3)) - 1.0
        en = gauge(extra)
        keep = np.concatenate([keep, extra[(en < 1.0) & (en ** 4 > inner)]])
    keep = keep[:n]
    directions = dilate(1.0 / gauge(keep), keep)
    directions.setflags(write=False)
    return directions


def sphere_samples(n: int, cfg: QuadratureConfig) -> np.ndarray:
    """n points on S(1) distributed as the normalized polar sphere measure σ."""
    return _sphere_cache(int(n), int(cfg.rng_seed))


def sphere_grid(n_angle: int = 24, n_height: int = 13) -> np.ndarray:
    """Deterministic grid on S(1): t = sin α, |z| = cos(α)^{1/2}, angle θ."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_angle, endpoint=False)
    alpha = np.linspace(-np.pi / 2.0, np.pi / 2.0, n_height)
    th, al = np.meshgrid(theta, alpha, indexing="ij")
    rho = np.sqrt(np.clip(np.cos(al), 0.0, None))
    pts = np.stack([rho * np.cos(th), rho * np.sin(th), np.sin(al)], axis=-1).reshape(-1, 3)
    # poles repeat for every angle
    return np.unique(np.round(pts, 15), axis=0)


def ball_volume(p, r: float, cfg: QuadratureConfig) -> float:
    """Lebesgue measure of B(p, r) by membership counting in a Euclidean bounding box."""
    if r <= 0:
        raise DomainError(f"Ball radius must be positive, got {r}")
    center = as_points(p).reshape(3)
    x, y, t = center
    # |t' − t| ≤ r² + 2r(|x| + |y|) on B(p, r)
    half = np.array([r, r, r * r + 2.0 * r * (abs(x) + abs(y))])
    u = cfg.sobol(3, cfg.mc_samples, STREAM_BOX)
    box = center + (2.0 * u - 1.0) * half
    fraction = float(np.mean(dist(box, center) < r))
    return fraction * float(np.prod(2.0 * half))


def box_integrate(f: Callable[[np.ndarray], np.ndarray], half_widths, n: int = 96) -> float:
    """Midpoint-rule integral of f over the centered box on an n³ grid."""
    half = np.asarray(half_widths, dtype=float)
    axes = [(np.arange(n) + 0.5) / n * 2.0 * h - h for h in half]
    cell = float(np.prod(2.0 * half / n))
    x, y = np.meshgrid(axes[0], axes[1], indexing="ij")
    plane = np.stack([x.ravel(), y.ravel(), np.zeros(x.size)], axis=-1)
    total = 0.0
    for t in axes[2]:
        plane[:, 2] = t
        total += float(np.sum(f(plane)))
    return total * cell


def sphere_mass(cfg: QuadratureConfig) -> float:
    """σ(S(1)), calibrated against the Cartesian ball volume so indicators agree."""
    return 4.0 * ball_volume(np.zeros(3), 1.0, cfg)


def _radial_breaks(r_max: float) -> np.ndarray:
    k_max = int(np.ceil(np.log2(r_max)))
    ladder = 2.0 ** np.arange(-8, k_max + 1)
    ladder = ladder[ladder < r_max]
    return np.concatenate([[0.0], ladder, [r_max]])


def _radial_segment(f, directions, a: float, b: float, order: int) -> float:
    nodes, weights = roots_legendre(order)
    radii = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    w = 0.5 * (b - a) * weights * radii ** 3
    total = 0.0
    for r, wr in zip(radii, w):
        total += wr * float(np.mean(f(dilate(r, directions))))
    return total


def polar_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig,
    r_max: float | None = None,
    *,
    directions: int = 4096,
    order: int = 8,
    tol: float = 1e-4,
    max_doublings: int = 40,
) -> float:
    """∫ f over the group in polar form.

    Radial quadrature is Gauss-Legendre on dyadic segments. With r_max the
    integral is truncated there; without it the dyadic ladder is extended
    until a segment contributes less than tol of the running sum, and a
    ladder that keeps growing raises IntegrabilityError.
    """
    omega = sphere_samples(directions, cfg)
    mass = sphere_mass(cfg)
    if r_max is not None:
        if r_max <= 0:
            raise DomainError(f"Radial cutoff must be positive, got {r_max}")
        breaks = _radial_breaks(r_max)
        total = sum(_radial_segment(f, omega, a, b, order) for a, b in zip(breaks[:-1], breaks[1:]))
        return mass * total

    breaks = _radial_breaks(1.0)
    total = sum(_radial_segment(f, omega, a, b, order) for a, b in zip(breaks[:-1], breaks[1:]))
    partial_sums = [mass * total]
    r = 1.0
    for _ in range(max_doublings):
        increment = _radial_segment(f, omega, r, 2.0 * r, order)
        total += increment
        partial_sums.append(mass * total)
        r *= 2.0
        if abs(increment) <= tol * max(abs(total), np.finfo(float).tiny):
            log.debug("polar_integrate settled at radius %g", r)
            return mass * total
    raise IntegrabilityError(
        f"Radial partial sums did not settle by radius {r:g}", partial_sums=partial_sums
    )
