"""
Carnot-Carathéodory and weighted distances by optimizing horizontal polylines.

The unknowns are the interior planar waypoints of a polyline from p to q;
the height mismatch of its lift at q is an equality constraint for SLSQP.
Waypoints are refined n → 2n along a ladder, restarts perturb the initial
path, and any residual height defect is closed with a small loop whose
length is added to the result.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from heisenqc.errors import ConfigError
from heisenqc.group.point import Point, as_points, dilate, gauge, mul
from heisenqc.group.quadrature import STREAM_PERTURB
from heisenqc.metric.curves import AdmissibleCurve, closing_loop, lift_heights, omega_length
from heisenqc.metric.david_semmes import WeightField

log = logging.getLogger(__name__)

_SMOOTH = 1e-18


@dataclass(frozen=True)
class CurveOptConfig:
    waypoint_ladder: tuple[int, ...] = (4, 8, 16, 32)
    restarts: int = 3
    maxiter: int = 300
    ftol: float = 1e-12
    closure_tolerance: float = 1e-3
    perturbation: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not self.waypoint_ladder or any(int(n) < 1 for n in self.waypoint_ladder):
            raise ConfigError(f"waypoint_ladder must hold positive integers, got {self.waypoint_ladder}")
        if int(self.restarts) < 1:
            raise ConfigError(f"restarts must be at least 1, got {self.restarts}")
        if self.closure_tolerance <= 0:
            raise ConfigError("closure_tolerance must be positive")
        object.__setattr__(self, "waypoint_ladder", tuple(int(n) for n in self.waypoint_ladder))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([int(self.seed), STREAM_PERTURB])

    def to_dict(self) -> dict:
        data = asdict(self)
        data["waypoint_ladder"] = list(self.waypoint_ladder)
        return data


@dataclass(frozen=True, eq=False)
class DistanceResult:
    value: float
    curve: AdmissibleCurve | None
    converged: bool
    closure_defect: float = 0.0
    restart_values: list[float] = field(default_factory=list)

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "closure_defect": self.closure_defect,
            "restart_values": list(self.restart_values),
        }


def _path(z: np.ndarray, start_xy: np.ndarray, end_xy: np.ndarray) -> np.ndarray:
    return np.vstack([start_xy, z.reshape(-1, 2), end_xy])


def _lengths(planar: np.ndarray) -> np.ndarray:
    diff = np.diff(planar, axis=0)
    return np.sqrt(np.sum(diff * diff, axis=1) + _SMOOTH)


def _upsample(planar: np.ndarray, n_segments: int) -> np.ndarray:
    """Resample a polyline to n_segments segments at equal arc length."""
    cumulative = np.concatenate([[0.0], np.cumsum(_lengths(planar))])
    s = np.linspace(0.0, cumulative[-1], n_segments + 1)
    return np.column_stack([np.interp(s, cumulative, planar[:, i]) for i in range(2)])


def _initial_path(target: np.ndarray, n_segments: int) -> np.ndarray:
    """Planar polyline from 0 to target_xy whose lift ends at height target_t.

    A parabolic bump over the chord when the chord is long enough, a circle
    through the origin otherwise.
    """
    end = target[:2]
    chord = float(np.hypot(*end))
    s = np.linspace(0.0, 1.0, n_segments + 1)
    if chord > 1e-6:
        normal = np.array([-end[1], end[0]]) / chord
        shape = 4.0 * s * (1.0 - s)
        unit = np.outer(s, end) + np.outer(shape, normal)
        # the lifted height is linear in the bump amplitude
        t_unit = lift_heights(unit)[-1]
        amplitude = target[2] / t_unit if t_unit != 0.0 else 0.0
        return np.outer(s, end) + amplitude * np.outer(shape, normal)
    R = np.sqrt(abs(target[2]) / (4.0 * np.pi))
    angles = np.pi + 2.0 * np.pi * s * (-1.0 if target[2] > 0 else 1.0)
    circle = np.column_stack([R + R * np.cos(angles), R * np.sin(angles)])
    circle[0] = circle[-1] = 0.0
    return circle


def _optimize(cost, planar0: np.ndarray, start_xy, end_xy, t_start: float, t_end: float, opt: CurveOptConfig):
    """SLSQP over interior waypoints with the lifted end height as equality constraint."""
    z0 = planar0[1:-1].ravel()
    if z0.size == 0:
        return planar0, True

    def height_gap(z):
        return lift_heights(_path(z, start_xy, end_xy), t_start)[-1] - t_end

    result = minimize(
        lambda z: cost(_path(z, start_xy, end_xy)),
        z0,
        method="SLSQP",
        constraints=[{"type": "eq", "fun": height_gap}],
        options={"maxiter": opt.maxiter, "ftol": opt.ftol},
    )
    return _path(result.x, start_xy, end_xy), bool(result.success)


def _solve(cost, start: np.ndarray, end: np.ndarray, initial: np.ndarray, opt: CurveOptConfig):
    """Best closed-up polyline over restarts and the waypoint ladder."""
    rng = opt.rng()
    scale = max(float(np.max(np.abs(initial))), 1e-12)
    best = None
    values = []
    for restart in range(opt.restarts):
        planar = _upsample(initial, opt.waypoint_ladder[0])
        if restart:
            noise = opt.perturbation * scale * rng.standard_normal(planar.shape)
            noise[0] = noise[-1] = 0.0
            planar = planar + noise
        ok = True
        for n in opt.waypoint_ladder:
            planar, success = _optimize(cost, _upsample(planar, n), start[:2], end[:2], start[2], end[2], opt)
            ok = ok and success
        defect = end[2] - lift_heights(planar, start[2])[-1]
        loop, _ = closing_loop(planar[-1], defect)
        full = np.vstack([planar, loop[1:]]) if loop.shape[0] > 1 else planar
        value = cost(full)
        values.append(float(value))
        if best is None or value < best[0]:
            best = (float(value), full, ok, defect)
    return best, values


def cc_distance(p, q, opt: CurveOptConfig | None = None) -> DistanceResult:
    """ρ(p, q) with a near-minimizing admissible curve.

    The problem is moved to 0 and a unit-gauge target by left translation
    and dilation, both of which scale horizontal length exactly.
    """
    opt = opt or CurveOptConfig()
    p = np.asarray(as_points(p), dtype=float).reshape(3)
    q = np.asarray(as_points(q), dtype=float).reshape(3)
    u = mul(-p, q)
    s = float(gauge(u))
    if s == 0.0:
        return DistanceResult(0.0, AdmissibleCurve(Point.from_array(p), p[:2].reshape(1, 2)), True)
    target = dilate(1.0 / s, u)
    cost = lambda planar: float(np.sum(_lengths(planar)))
    (value, planar, ok, defect), values = _solve(
        cost, np.zeros(3), target, _initial_path(target, opt.waypoint_ladder[0]), opt
    )
    converged = ok and abs(defect) <= opt.closure_tolerance * max(1.0, abs(target[2]))
    if not converged:
        log.warning("cc_distance: optimizer flagged for target %s (defect %.3g)", target.tolist(), defect)
    # back to p: scale by s, then translate the planar path by p's projection
    curve = AdmissibleCurve(Point.from_array(p), p[:2] + s * planar)
    return DistanceResult(s * value, curve, converged, float(s * s * defect), [s * v for v in values])


def weighted_distance(p, q, omega: WeightField, opt: CurveOptConfig | None = None) -> DistanceResult:
    """ρ_ω(p, q) = inf ∫_γ ω^{1/4}; exactly ω^{1/4}·ρ for constant ω."""
    opt = opt or CurveOptConfig()
    base = cc_distance(p, q, opt)
    if omega.is_constant:
        factor = omega.constant_value ** 0.25
        return DistanceResult(
            factor * base.value, base.curve, base.converged, base.closure_defect,
            [factor * v for v in base.restart_values],
        )
    p = np.asarray(as_points(p), dtype=float).reshape(3)
    q = np.asarray(as_points(q), dtype=float).reshape(3)
    if base.value == 0.0:
        return base

    def cost(planar):
        return omega_length(AdmissibleCurve(Point.from_array(p), planar), omega, order=2)

    (value, planar, ok, defect), values = _solve(cost, p, q, np.asarray(base.curve.planar), opt)
    curve = AdmissibleCurve(Point.from_array(p), planar)
    value = omega_length(curve, omega)
    converged = ok and abs(defect) <= opt.closure_tolerance * max(1.0, abs(q[2] - p[2]))
    return DistanceResult(value, curve, converged, float(defect), values)
