"""
Jacobian by volume ratios: J_F(p) = lim |F B(p, r)| / |B(p, r)|.

The image volume is measured without describing the image set: points are
drawn uniformly from a gauge ball that contains F B(p, r) and kept when
F⁻¹ maps them back into B(p, r).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from heisenqc.errors import DomainError, QuadratureError
from heisenqc.flow.composed import as_composed
from heisenqc.group.point import as_points, dilate, dist, mul
from heisenqc.group.quadrature import QuadratureConfig, sample_ball, sphere_grid

log = logging.getLogger(__name__)

RADIUS_LADDER = (0.1, 0.05, 0.025, 0.0125)
# margin of the enclosing image ball over the sampled boundary image
IMAGE_MARGIN = 1.15
# fit residual, in standard errors, above which the ladder counts as noisy
NOISE_TOLERANCE = 4.0


@dataclass(frozen=True)
class VolumeJacobian:
    value: float
    radii: tuple[float, ...]
    ratios: tuple[float, ...]
    standard_errors: tuple[float, ...]
    slope: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "radii": list(self.radii),
            "ratios": list(self.ratios),
            "standard_errors": list(self.standard_errors),
            "slope": self.slope,
            "converged": self.converged,
            "diagnostics": dict(self.diagnostics),
        }


def image_radius(F, p: np.ndarray, r: float, image_center: np.ndarray | None = None) -> float:
    """Radius of a ball about F(p) that holds F(S(p, r)) with a margin."""
    Fmap = as_composed(F)
    center = Fmap.apply(p.reshape(1, 3))[0] if image_center is None else image_center
    boundary = mul(p, dilate(r, sphere_grid()))
    return IMAGE_MARGIN * float(np.max(dist(Fmap.apply(boundary), center)))


def volume_ratio(F, p, r: float, cfg: QuadratureConfig) -> tuple[float, float]:
    """|F B(p, r)| / |B(p, r)| and its binomial standard error."""
    if r <= 0:
        raise DomainError(f"Ball radius must be positive, got {r}")
    Fmap = as_composed(F)
    center = np.asarray(as_points(p), dtype=float).reshape(3)
    image_center = Fmap.apply(center.reshape(1, 3))[0]
    R = image_radius(Fmap, center, r, image_center)
    if not (R > 0 and np.isfinite(R)):
        raise QuadratureError("Degenerate image ball", diagnostics={"r": r, "image_radius": R})
    q = sample_ball(image_center, R, cfg.mc_samples, cfg)
    inside = dist(Fmap.inverse_apply(q), center) < r
    fraction = float(np.mean(inside))
    scale = (R / r) ** 4
    stderr = np.sqrt(max(fraction * (1.0 - fraction), 1.0 / cfg.mc_samples) / cfg.mc_samples)
    return fraction * scale, float(stderr * scale)


def jacobian_volume(F, p, radii=RADIUS_LADDER, cfg: QuadratureConfig | None = None) -> VolumeJacobian:
    """Volume-ratio Jacobian extrapolated to r → 0 with a fit a + b·r²."""
    cfg = cfg or QuadratureConfig()
    radii = tuple(float(r) for r in radii)
    if not radii or any(r <= 0 for r in radii):
        raise DomainError(f"Radii must be positive, got {radii}")
    ratios, errors = zip(*(volume_ratio(F, p, r, cfg) for r in radii))
    ratios = np.array(ratios)
    errors = np.array(errors)
    r2 = np.array(radii) ** 2

    if len(radii) >= 2:
        design = np.stack([np.ones_like(r2), r2], axis=-1)
        weights = 1.0 / np.maximum(errors, 1e-12)
        coef, *_ = np.linalg.lstsq(design * weights[:, None], ratios * weights, rcond=None)
        value, slope = float(coef[0]), float(coef[1])
        residual = np.abs(design @ coef - ratios) / np.maximum(errors, 1e-12)
        converged = bool(np.all(residual <= NOISE_TOLERANCE)) and value > 0
    else:
        value, slope, residual, converged = float(ratios[0]), 0.0, np.zeros(1), True

    if value <= 0:
        # the fit can overshoot through zero when the ladder is noisy
        value = float(ratios[-1])
    if not converged:
        log.warning("volume Jacobian ladder is noisy at %s: ratios=%s", np.asarray(p).tolist(), ratios.tolist())
    return VolumeJacobian(
        value=value,
        radii=radii,
        ratios=tuple(ratios.tolist()),
        standard_errors=tuple(errors.tolist()),
        slope=slope,
        converged=converged,
        diagnostics={"fit_residual_max": float(residual.max()), "samples": cfg.mc_samples},
    )
