"""
Finite signed measures as atoms plus a density sampled on a Cartesian grid.

Responsibilities:
- Hold atoms and grid densities; serialize to and from JSON dictionaries.
- Total variation, admissibility (finite log moment), restriction to balls.
- Smoothing by the mollifier Ψ_k(p) = k⁴ Ψ(δ_k p).
- Relocation of atom measures by left translation and dilation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy.integrate import quad

from heisenqc.errors import ConfigError, DomainError
from heisenqc.group.point import Point, as_points, dilate, gauge, inv, mul
from heisenqc.group.quadrature import QuadratureConfig

log = logging.getLogger(__name__)

# guard against grids that would not fit in memory
MAX_GRID_CELLS = 4_000_000


@dataclass(frozen=True)
class Atom:
    location: Point
    mass: float

    def to_dict(self) -> dict:
        return {"location": self.location.to_list(), "mass": self.mass}

    @classmethod
    def from_dict(cls, data: dict) -> "Atom":
        return cls(Point(*data["location"]), float(data["mass"]))


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Signed density samples at the nodes origin + i·spacing."""
    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        spacing = np.asarray(self.spacing, dtype=float).reshape(3)
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3:
            raise DomainError(f"Density values must be a 3-D array, got shape {values.shape}")
        if np.any(spacing <= 0):
            raise DomainError("Density spacing must be positive")
        if not np.all(np.isfinite(values)):
            raise DomainError("Density values must be finite")
        for name, value in (("origin", origin), ("spacing", spacing), ("values", values)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(n) for n in self.values.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [self.origin[i] + self.spacing[i] * np.arange(self.dims[i]) for i in range(3)]

    def nodes(self) -> np.ndarray:
        xs, ys, ts = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([xs, ys, ts], axis=-1).reshape(-1, 3)

    def to_dict(self) -> dict:
        return {
            "origin": self.origin.tolist(),
            "spacing": self.spacing.tolist(),
            "dims": list(self.dims),
            "values": self.values.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DensityGrid":
        dims = tuple(int(n) for n in data["dims"])
        values = np.asarray(data["values"], dtype=float)
        if values.size != int(np.prod(dims)):
            raise ConfigError(f"Density has {values.size} values but dims {dims}")
        return cls(np.asarray(data["origin"]), np.asarray(data["spacing"]), values.reshape(dims))


@dataclass(frozen=True)
class Measure:
    """μ = Σ mass·δ_location + density·Lebesgue."""
    atoms: tuple[Atom, ...] = ()
    density: DensityGrid | None = field(default=None)

    @classmethod
    def empty(cls) -> "Measure":
        return cls()

    @classmethod
    def dirac(cls, location=(0.0, 0.0, 0.0), mass: float = 1.0) -> "Measure":
        loc = location if isinstance(location, Point) else Point(*location)
        return cls(atoms=(Atom(loc, float(mass)),))

    @classmethod
    def from_atoms(cls, pairs: Iterable[tuple]) -> "Measure":
        return cls(atoms=tuple(Atom(loc if isinstance(loc, Point) else Point(*loc), float(m))
                               for loc, m in pairs))

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Discrete representation: points (N, 3) and weights (N,), zero weights dropped."""
        points = [a.location.to_list() for a in self.atoms]
        weights = [a.mass for a in self.atoms]
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        wts = np.asarray(weights, dtype=float)
        if self.density is not None:
            cell = self.density.values.ravel() * self.density.cell_volume
            keep = cell != 0.0
            pts = np.concatenate([pts, self.density.nodes()[keep]])
            wts = np.concatenate([wts, cell[keep]])
        return pts, wts

    def signed_mass(self) -> float:
        return float(np.sum(self.nodes()[1]))

    def as_atoms(self) -> "Measure":
        pts, wts = self.nodes()
        return Measure.from_atoms(zip(map(tuple, pts), wts))

    def left_translate(self, u) -> "Measure":
        """Pushforward under p ↦ u ⋆ p (densities become atoms)."""
        base = self.as_atoms() if self.density is not None else self
        return Measure(atoms=tuple(Atom(Point.from_array(mul(u, a.location)), a.mass) for a in base.atoms))

    def dilate(self, r: float) -> "Measure":
        """Pushforward under δ_r (densities become atoms)."""
        base = self.as_atoms() if self.density is not None else self
        return Measure(atoms=tuple(Atom(Point.from_array(dilate(r, a.location)), a.mass) for a in base.atoms))

    # ---- Serialization helpers ----
    def to_dict(self) -> dict:
        data = {"atoms": [a.to_dict() for a in self.atoms]}
        if self.density is not None:
            data["density"] = self.density.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Measure":
        atoms = tuple(Atom.from_dict(a) for a in data.get("atoms", []))
        density = DensityGrid.from_dict(data["density"]) if data.get("density") else None
        return cls(atoms=atoms, density=density)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    total_variation: float
    log_moment: float
    shell_moments: list[float]
    message: str

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "total_variation": self.total_variation,
            "log_moment": self.log_moment,
            "shell_moments": list(self.shell_moments),
            "message": self.message,
        }


def total_variation(mu: Measure) -> float:
    """Σ|atom masses| + ∫|density|."""
    atoms = sum(abs(a.mass) for a in mu.atoms)
    dens = 0.0 if mu.density is None else float(np.abs(mu.density.values).sum() * mu.density.cell_volume)
    return float(atoms + dens)


def log_moment_shells(mu: Measure) -> list[float]:
    """∫ log⁺‖q‖ d|μ| split over dyadic shells 2^{j−1} ≤ ‖q‖ < 2^j, j = 1, 2, …"""
    pts, wts = mu.nodes()
    if pts.shape[0] == 0:
        return []
    norms = gauge(pts)
    outside = norms > 1.0
    if not np.any(outside):
        return []
    shell = np.ceil(np.log2(norms[outside])).astype(int)
    contrib = np.abs(wts[outside]) * np.log(norms[outside])
    return [float(contrib[shell == j].sum()) for j in range(1, int(shell.max()) + 1)]


def is_admissible(mu: Measure, tol: float = 1e-3) -> AdmissibilityReport:
    """Finite total variation and finite log moment, with the shell breakdown.

    The last shell's share of the log moment is reported; a share above tol
    means the moment is still growing at the edge of the support.
    """
    tv = total_variation(mu)
    shells = log_moment_shells(mu)
    moment = float(sum(shells))
    admissible = bool(np.isfinite(tv) and np.isfinite(moment))
    if shells and moment > 0:
        tail = shells[-1] / moment
        message = f"last dyadic shell carries {tail:.3g} of the log moment"
        if tail > tol:
            message += " (above tolerance: tail not yet negligible)"
    else:
        message = "support inside B(1): log moment vanishes"
    return AdmissibilityReport(admissible, tv, moment, shells, message)


def restrict(mu: Measure, k: float) -> Measure:
    """μ restricted to the open ball B(k)."""
    if k <= 0:
        raise DomainError(f"Restriction radius must be positive, got {k}")
    atoms = tuple(a for a in mu.atoms if float(gauge(a.location)) < k)
    density = None
    if mu.density is not None:
        inside = (gauge(mu.density.nodes()) < k).reshape(mu.density.dims)
        values = np.where(inside, mu.density.values, 0.0)
        if np.any(values != 0.0):
            density = DensityGrid(mu.density.origin, mu.density.spacing, values)
    return Measure(atoms=atoms, density=density)


def _bump_profile(rho2: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho2)
    inside = rho2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho2[inside]))
    return out


@lru_cache(maxsize=1)
def _bump_normalizer() -> float:
    value, _ = quad(lambda r: 4.0 * np.pi * r * r * np.exp(-1.0 / (1.0 - r * r)), 0.0, 1.0)
    return value


def mollifier(points) -> np.ndarray:
    """Ψ: smooth bump supported in the Euclidean unit ball (inside B(1)), ∫Ψ = 1."""
    p = as_points(points)
    return _bump_profile(np.sum(p * p, axis=-1)) / _bump_normalizer()


def mollifier_k(points, k: float) -> np.ndarray:
    """Ψ_k(p) = k⁴ Ψ(δ_k p), supported in B(1/k)."""
    return k ** 4 * mollifier(dilate(k, points))


def _regularization_box(pts: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray]:
    r = 1.0 / k
    lo_xy = pts[:, :2].min(axis=0) - r
    hi_xy = pts[:, :2].max(axis=0) + r
    reach = r * r + 2.0 * r * (np.abs(pts[:, 0]) + np.abs(pts[:, 1]))
    lo_t = (pts[:, 2] - reach).min()
    hi_t = (pts[:, 2] + reach).max()
    return np.array([lo_xy[0], lo_xy[1], lo_t]), np.array([hi_xy[0], hi_xy[1], hi_t])


def regularize(mu: Measure, k: int, cfg: QuadratureConfig | None = None) -> Measure:
    """Density ψ_k(p) = ∫ Ψ_k(q⁻¹p) dμ(q) sampled on a grid.

    The grid resolves a ball of radius 1/k with cfg.grid_resolution nodes per
    axis and is widened to cover the whole support.
    """
    cfg = cfg or QuadratureConfig()
    if k <= 0:
        raise DomainError(f"Regularization index must be positive, got {k}")
    pts, wts = mu.nodes()
    if pts.shape[0] == 0:
        return Measure.empty()

    lo, hi = _regularization_box(pts, float(k))
    n = cfg.grid_resolution
    r = 1.0 / k
    step = np.array([2.0 * r / n, 2.0 * r / n, 2.0 * r * r / n])
    dims = np.maximum(np.ceil((hi - lo) / step).astype(int) + 1, 2)
    if int(np.prod(dims)) > MAX_GRID_CELLS:
        raise ConfigError(f"Regularization grid {tuple(dims)} exceeds {MAX_GRID_CELLS} cells")
    step = (hi - lo) / (dims - 1)
    axes = [lo[i] + step[i] * np.arange(dims[i]) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)

    values = np.zeros(grid.shape[0])
    for q, w in zip(pts, wts):
        # only grid nodes within the bounding box of B(q, 1/k) can be reached
        reach = r * r + 2.0 * r * (abs(q[0]) + abs(q[1]))
        near = np.all(np.abs(grid[:, :2] - q[:2]) <= r, axis=1) & (np.abs(grid[:, 2] - q[2]) <= reach)
        if np.any(near):
            values[near] += w * mollifier_k(mul(inv(q), grid[near]), float(k))
    log.debug("regularize: %d nodes onto grid %s", pts.shape[0], tuple(dims))
    return Measure(density=DensityGrid(lo, step, values.reshape(tuple(dims))))
