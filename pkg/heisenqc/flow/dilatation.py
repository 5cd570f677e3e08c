"""
Dilatation of maps: metric estimates on small spheres, the analytic value
|A|²/det A from the horizontal differential, and quasisymmetry diagnostics.

Responsibilities:
- dilatation: max/min of d(F(p), F(q)) over q ∈ S(p, r) on a radius ladder.
- analytic_dilatation and composition_dilatation from D_H F.
- contact_residual: the contact equation of F checked by differences.
- qs_checks: ball comparability, growth, reverse Hölder, change of variables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from heisenqc.flow.composed import as_composed
from heisenqc.flow.jacobian import IMAGE_MARGIN, RADIUS_LADDER
from heisenqc.group.derivatives import Direction
from heisenqc.group.point import as_points, dilate, dist, gauge, mul
from heisenqc.group.quadrature import (
    UNIT_BALL_VOLUME,
    QuadratureConfig,
    sample_ball,
    sphere_grid,
    sphere_samples,
    unit_ball_samples,
)

log = logging.getLogger(__name__)

REVERSE_HOLDER_EXPONENTS = (1.1, 1.25, 1.5)
GROWTH_RADII = (1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True, eq=False)
class DilatationReport:
    points: np.ndarray
    radii: tuple[float, ...]
    ratios: np.ndarray  # (points, radii)
    H: np.ndarray       # per point, max over the two smallest radii
    K: float

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "radii": list(self.radii),
            "ratios": self.ratios.tolist(),
            "H": self.H.tolist(),
            "K": self.K,
        }


def _directions(samples_per_sphere: int | None, cfg: QuadratureConfig) -> np.ndarray:
    if samples_per_sphere is None:
        return sphere_grid()
    return sphere_samples(samples_per_sphere, cfg)


def dilatation(
    F,
    p,
    radii=RADIUS_LADDER,
    samples_per_sphere: int | None = None,
    cfg: QuadratureConfig | None = None,
) -> DilatationReport:
    """Metric dilatation estimates at one or more base points.

    All sphere points for all radii and base points go through F in a
    single batch.
    """
    cfg = cfg or QuadratureConfig()
    Fmap = as_composed(F)
    base = np.atleast_2d(as_points(p)).astype(float)
    radii = tuple(sorted((float(r) for r in radii), reverse=True))
    omega = _directions(samples_per_sphere, cfg)
    n_base, n_r, n_dir = base.shape[0], len(radii), omega.shape[0]

    offsets = np.concatenate([dilate(r, omega) for r in radii])             # (R·D, 3)
    spheres = mul(base[:, None, :], offsets[None, :, :]).reshape(-1, 3)      # (P·R·D, 3)
    images = Fmap.apply(np.concatenate([base, spheres]))
    centers, sphere_images = images[:n_base], images[n_base:].reshape(n_base, n_r, n_dir, 3)

    d = dist(sphere_images, centers[:, None, None, :])
    ratios = d.max(axis=-1) / d.min(axis=-1)
    H = ratios[:, -2:].max(axis=1) if n_r >= 2 else ratios[:, -1]
    K = float(H.max())
    log.debug("dilatation at %d points over radii %s: K=%g", n_base, radii, K)
    return DilatationReport(points=base, radii=radii, ratios=ratios, H=H, K=K)


def analytic_dilatation(F, p):
    """|A|²/det A with A = D_H F(p) and the operator norm."""
    points = as_points(p)
    A = as_composed(F).horizontal_differential(np.atleast_2d(points))
    norm = np.linalg.norm(A, ord=2, axis=(1, 2))
    K = norm ** 2 / np.linalg.det(A)
    return K if points.ndim > 1 else float(K[0])


def composition_dilatation(f1, f2, points) -> dict:
    """Pointwise K(f1∘f2)(p) against K(f1)(f2(p))·K(f2)(p)."""
    pts = np.atleast_2d(as_points(points))
    inner = as_composed(f2)
    composed = inner.then(*as_composed(f1).word)
    k_composed = analytic_dilatation(composed, pts)
    k_product = analytic_dilatation(f1, inner.apply(pts)) * analytic_dilatation(inner, pts)
    quotient = k_composed / k_product
    return {
        "sup_composed": float(k_composed.max()),
        "sup_product": float(k_product.max()),
        "max_quotient": float(quotient.max()),
    }


def contact_residual(F, p, cfg: QuadratureConfig | None = None):
    """max over X, Y of |W f₃ − 2f₂·W f₁ + 2f₁·W f₂| by central differences."""
    cfg = cfg or QuadratureConfig()
    Fmap = as_composed(F)
    points = as_points(p)
    pts = np.atleast_2d(points)
    f = Fmap.apply(pts)
    h = cfg.fd_step
    worst = np.zeros(pts.shape[0])
    for direction in (Direction.X, Direction.Y):
        step = direction.generator(h)
        df = (Fmap.apply(mul(pts, step)) - Fmap.apply(mul(pts, -step))) / (2.0 * h)
        residual = df[:, 2] - 2.0 * f[:, 1] * df[:, 0] + 2.0 * f[:, 0] * df[:, 1]
        worst = np.maximum(worst, np.abs(residual))
    return worst if points.ndim > 1 else float(worst[0])


@dataclass(frozen=True)
class QSReport:
    ball_comparability: float
    growth_constant: float
    reverse_holder: dict = field(default_factory=dict)
    change_of_variables_residual: float = 0.0
    dilatation_bound: float = 1.0

    def to_dict(self) -> dict:
        return {
            "ball_comparability": self.ball_comparability,
            "growth_constant": self.growth_constant,
            "reverse_holder": {str(k): v for k, v in self.reverse_holder.items()},
            "change_of_variables_residual": self.change_of_variables_residual,
            "dilatation_bound": self.dilatation_bound,
        }


def _bump(q: np.ndarray) -> np.ndarray:
    n4 = gauge(q) ** 4
    return np.exp(-4.0 * n4)


def _ball_comparability(Fmap, p: np.ndarray, q: np.ndarray, cfg: QuadratureConfig):
    """Spread max/min of |F B(p, r)|^{1/4} / d(F(p), F(q)) with r = d(p, q)."""
    w = unit_ball_samples(min(cfg.mc_samples, 4096), cfg)
    r = dist(q, p)
    quotients, balls = [], []
    for pi, qi, ri in zip(p, q, r):
        inside = mul(pi, dilate(ri, w))
        volume = UNIT_BALL_VOLUME * ri ** 4 * float(np.mean(np.exp(Fmap.log_jacobian(inside))))
        images = Fmap.apply(np.stack([pi, qi]))
        quotients.append(volume ** 0.25 / float(dist(images[1], images[0])))
        balls.append(inside)
    quotients = np.array(quotients)
    return float(quotients.max() / quotients.min()), balls


def _reverse_holder(Fmap, balls, exponents) -> dict:
    out = {}
    jacobians = [np.exp(Fmap.log_jacobian(ball)) for ball in balls]
    for s in exponents:
        quotients = [np.mean(J ** s) ** (1.0 / s) / np.mean(J) for J in jacobians]
        out[float(s)] = float(max(quotients))
    return out


def _growth_constant(Fmap, K: float) -> float:
    """sup ‖F(p)‖ / ‖p‖^{K^{2/3}} over spheres of radius ≥ 1."""
    omega = sphere_grid(12, 7)
    exponent = K ** (2.0 / 3.0)
    worst = 0.0
    for R in GROWTH_RADII:
        worst = max(worst, float(np.max(gauge(Fmap.apply(dilate(R, omega))))) / R ** exponent)
    return worst


def _change_of_variables(Fmap, cfg: QuadratureConfig) -> float:
    """Relative gap between ∫_{F B(1)} u and ∫_{B(1)} (u∘F)·J_F."""
    w = unit_ball_samples(cfg.mc_samples, cfg)
    domain = UNIT_BALL_VOLUME * float(np.mean(_bump(Fmap.apply(w)) * np.exp(Fmap.log_jacobian(w))))
    center = Fmap.apply(np.zeros((1, 3)))[0]
    R = IMAGE_MARGIN * float(np.max(dist(Fmap.apply(sphere_grid()), center)))
    q = sample_ball(center, R, cfg.mc_samples, cfg)
    inside = gauge(Fmap.inverse_apply(q)) < 1.0
    image = UNIT_BALL_VOLUME * R ** 4 * float(np.mean(np.where(inside, _bump(q), 0.0)))
    return abs(image - domain) / max(abs(domain), np.finfo(float).tiny)


def qs_checks(F, pairs=None, cfg: QuadratureConfig | None = None) -> QSReport:
    """Empirical quasisymmetry and integrability constants of F.

    pairs is (p, q) with arrays of shape (N, 3); by default 16 pairs drawn
    from B(1) with d(p, q) spread over the radius ladder.
    """
    cfg = cfg or QuadratureConfig()
    Fmap = as_composed(F)
    if pairs is None:
        p = unit_ball_samples(16, cfg)
        omega = sphere_grid(4, 3)
        radii = np.resize(np.array(RADIUS_LADDER), 16)
        q = mul(p, dilate(radii, omega[np.arange(16) % omega.shape[0]]))
    else:
        p, q = (np.atleast_2d(as_points(a)).astype(float) for a in pairs)

    comparability, balls = _ball_comparability(Fmap, p, q, cfg)
    K = float(np.max(analytic_dilatation(Fmap, p)))
    report = QSReport(
        ball_comparability=comparability,
        growth_constant=_growth_constant(Fmap, K),
        reverse_holder=_reverse_holder(Fmap, balls, REVERSE_HOLDER_EXPONENTS),
        change_of_variables_residual=_change_of_variables(Fmap, cfg),
        dilatation_bound=K,
    )
    log.info("qs checks: %s", report.to_dict())
    return report
