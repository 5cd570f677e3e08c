"""
Conformal strain of a contact field on a ball or annulus.

S_H v is the symmetric trace-free part of D_H v. With Z = ½(X − iY),
√2|ZZφ| = 2‖S_H v‖_F pointwise; the report carries both fields, the
residual of that identity and the estimated budget c = √2·sup|ZZφ|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from heisenqc.contact.field import ContactField
from heisenqc.errors import SingularityError
from heisenqc.group.point import as_points, dist
from heisenqc.group.quadrature import QuadratureConfig

log = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-3


class ZConvention(str, Enum):
    HALF = "Z=(X-iY)/2"
    UNIT = "Z=X-iY"

    @property
    def scale(self) -> float:
        return 0.25 if self is ZConvention.HALF else 1.0


@dataclass(frozen=True, eq=False)
class StrainReport:
    points: np.ndarray
    strain_frobenius: np.ndarray
    zz_modulus: np.ndarray
    sup_estimate: float
    worst_point: list[float]
    residual_max: float
    z_convention: ZConvention
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "c": self.sup_estimate,
            "grid": dict(self.grid),
            "worst_point": list(self.worst_point),
            "residual_max": self.residual_max,
            "z_convention": self.z_convention.value,
        }


def region_grid(center, radius: float, inner_radius: float, n: int) -> np.ndarray:
    """Cartesian n³ grid over the bounding box of B(center, radius), cut to the annulus."""
    c = as_points(center).reshape(3)
    half = np.array([radius, radius, radius ** 2 + 2.0 * radius * (abs(c[0]) + abs(c[1]))])
    axes = [np.linspace(c[i] - half[i], c[i] + half[i], n) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    d = dist(grid, c)
    return grid[(d <= radius) & (d >= inner_radius)]


def strain_tensor(D: np.ndarray) -> np.ndarray:
    """½[[Xv₁−Yv₂, Xv₂+Yv₁], [Xv₂+Yv₁, Yv₂−Xv₁]] from D_H v."""
    a = D[:, 0, 0] - D[:, 1, 1]
    b = D[:, 1, 0] + D[:, 0, 1]
    return 0.5 * np.stack([np.stack([a, b], -1), np.stack([b, -a], -1)], axis=-2)


def zz_modulus(H: np.ndarray, convention: ZConvention = ZConvention.HALF) -> np.ndarray:
    """|ZZφ| from the horizontal Hessian H[i, j] = X_i X_j φ."""
    real = H[:, 0, 0] - H[:, 1, 1]
    imag = H[:, 0, 1] + H[:, 1, 0]
    return convention.scale * np.hypot(real, imag)


def strain(
    v: ContactField,
    center=(0.0, 0.0, 0.0),
    radius: float = 2.0,
    inner_radius: float = 0.0,
    cfg: QuadratureConfig | None = None,
) -> StrainReport:
    """Strain, |ZZφ| and budget c on a grid over {inner_radius ≤ d(p, center) ≤ radius}."""
    cfg = cfg or QuadratureConfig()
    points = region_grid(center, radius, inner_radius, cfg.grid_resolution)
    H = v.source.horizontal_hessian(points)
    bad = ~np.all(np.isfinite(H.reshape(H.shape[0], -1)), axis=1)
    if np.any(bad):
        raise SingularityError(
            f"Non-finite second derivatives at {int(bad.sum())} grid points", points=points[bad]
        )
    D = v.horizontal_differential(points)
    frob = np.linalg.norm(strain_tensor(D), axis=(1, 2))

    convention = ZConvention.HALF
    zz = zz_modulus(H, convention)
    residual = np.abs(np.sqrt(2.0) * zz - 2.0 * frob)
    if residual.size and residual.max() > IDENTITY_TOLERANCE:
        log.warning("strain identity failed under %s; trying %s", convention.value, ZConvention.UNIT.value)
        convention = ZConvention.UNIT
        zz = zz_modulus(H, convention)
        residual = np.abs(np.sqrt(2.0) * zz - 2.0 * frob)

    worst = int(np.argmax(zz)) if zz.size else 0
    c = float(np.sqrt(2.0) * zz.max()) if zz.size else 0.0
    return StrainReport(
        points=points,
        strain_frobenius=frob,
        zz_modulus=zz,
        sup_estimate=c,
        worst_point=points[worst].tolist() if zz.size else [0.0, 0.0, 0.0],
        residual_max=float(residual.max()) if residual.size else 0.0,
        z_convention=convention,
        grid={
            "center": as_points(center).reshape(3).tolist(),
            "radius": radius,
            "inner_radius": inner_radius,
            "resolution": cfg.grid_resolution,
            "points": int(points.shape[0]),
        },
    )
