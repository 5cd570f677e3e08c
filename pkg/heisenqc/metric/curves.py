"""
Horizontal curves as lifts of planar polylines, and their lengths.

A planar segment from (x_i, y_i) to (x_{i+1}, y_{i+1}) lifts to the
horizontal segment p_i ⋆ (Δx, Δy, 0), so along the lift
t_{i+1} = t_i + 2(x_{i+1}·y_i − x_i·y_{i+1}). A closed planar loop of
signed area A raises t by −4A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

from heisenqc.errors import DomainError
from heisenqc.group.point import Point, as_points, dist, mul
from heisenqc.metric.david_semmes import david_semmes

log = logging.getLogger(__name__)

GAUSS_ORDER = 8


def lift_heights(planar: np.ndarray, t0: float = 0.0) -> np.ndarray:
    """t along the horizontal lift of a planar polyline (n, 2) started at height t0."""
    x, y = planar[..., 0], planar[..., 1]
    increments = 2.0 * (x[..., 1:] * y[..., :-1] - x[..., :-1] * y[..., 1:])
    return t0 + np.concatenate([np.zeros(x.shape[:-1] + (1,)), np.cumsum(increments, axis=-1)], axis=-1)


def signed_area(planar: np.ndarray) -> float:
    """Shoelace area of the polygon closed by joining the last vertex to the first."""
    x, y = planar[:, 0], planar[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class HorizontalSegment:
    start: Point
    dx: float
    dy: float

    @property
    def end(self) -> Point:
        return Point.from_array(mul(self.start, (self.dx, self.dy, 0.0)))

    @property
    def length(self) -> float:
        return float(np.hypot(self.dx, self.dy))

    def at(self, s) -> np.ndarray:
        """Points start ⋆ (s·dx, s·dy, 0) for s ∈ [0, 1]."""
        s = np.asarray(s, dtype=float)
        steps = np.stack([s * self.dx, s * self.dy, np.zeros_like(s)], axis=-1)
        return mul(self.start, steps)


@dataclass(frozen=True, eq=False)
class AdmissibleCurve:
    """Horizontal lift of a planar polyline starting at `start`."""
    start: Point
    planar: np.ndarray

    def __post_init__(self):
        planar = np.asarray(self.planar, dtype=float)
        if planar.ndim != 2 or planar.shape[1] != 2 or planar.shape[0] < 1:
            raise DomainError(f"Planar vertices must have shape (n, 2), got {planar.shape}")
        if not np.allclose(planar[0], [self.start.x, self.start.y]):
            raise DomainError("First planar vertex must match the start point")
        planar.setflags(write=False)
        object.__setattr__(self, "planar", planar)

    @property
    def vertices(self) -> np.ndarray:
        return np.column_stack([self.planar, lift_heights(self.planar, self.start.t)])

    @property
    def end(self) -> Point:
        return Point.from_array(self.vertices[-1])

    @property
    def segments(self) -> list[HorizontalSegment]:
        v = self.vertices
        return [HorizontalSegment(Point.from_array(a), *(b[:2] - a[:2])) for a, b in zip(v[:-1], v[1:])]

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.planar, axis=0), axis=1)

    @property
    def breakpoints(self) -> np.ndarray:
        """Arc-length parameters of the vertices, normalized to [0, 1]."""
        cumulative = np.concatenate([[0.0], np.cumsum(self.segment_lengths)])
        total = cumulative[-1]
        return cumulative / total if total > 0 else np.linspace(0.0, 1.0, cumulative.size)

    @property
    def horizontal_length(self) -> float:
        return float(self.segment_lengths.sum())

    def horizontality_residual(self) -> float:
        """max |Δt − 2(x_{i+1}y_i − x_i y_{i+1})| over segments of the stored vertices."""
        v = self.vertices
        expected = 2.0 * (v[1:, 0] * v[:-1, 1] - v[:-1, 0] * v[1:, 1])
        return float(np.max(np.abs(np.diff(v[:, 2]) - expected), initial=0.0))

    def at(self, s) -> np.ndarray:
        """Points at normalized arc-length parameters s ∈ [0, 1]."""
        s = np.clip(np.atleast_1d(np.asarray(s, dtype=float)), 0.0, 1.0)
        if self.planar.shape[0] == 1:
            return np.tile(self.vertices[0], (s.size, 1))
        knots = self.breakpoints
        index = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, knots.size - 2)
        width = np.maximum(knots[index + 1] - knots[index], np.finfo(float).tiny)
        local = (s - knots[index]) / width
        v = self.vertices
        steps = np.column_stack([local[:, None] * (v[index + 1, :2] - v[index, :2]), np.zeros(s.size)])
        return mul(v[index], steps)

    def then(self, planar_tail: np.ndarray) -> "AdmissibleCurve":
        """Continue with further planar vertices (the first must equal the current end)."""
        tail = np.asarray(planar_tail, dtype=float)
        return AdmissibleCurve(self.start, np.concatenate([self.planar, tail[1:]]))

    def to_dict(self) -> dict:
        return {"start": self.start.to_list(), "planar": self.planar.tolist()}


def horizontal_lift(start, planar) -> AdmissibleCurve:
    """Admissible curve from a start point and planar vertices (the first is the start's projection)."""
    p = start if isinstance(start, Point) else Point.from_array(start)
    return AdmissibleCurve(p, np.asarray(planar, dtype=float))


def circular_loop(center_xy, radius: float, n: int = 64, clockwise: bool = False, phase: float = 0.0) -> np.ndarray:
    """Closed regular n-gon through the point center + radius·(cos phase, sin phase)."""
    angles = phase + np.linspace(0.0, 2.0 * np.pi, n + 1)
    if clockwise:
        angles = 2.0 * phase - angles
    return np.asarray(center_xy, dtype=float) + radius * np.column_stack([np.cos(angles), np.sin(angles)])


def closing_loop(at_xy, defect: float, n: int = 64) -> tuple[np.ndarray, float]:
    """Planar loop based at at_xy whose lift raises t by defect; returns (vertices, length)."""
    if defect == 0.0:
        return np.asarray(at_xy, dtype=float).reshape(1, 2), 0.0
    # regular n-gon area (n/2)R² sin(2π/n) = |defect|/4
    R = np.sqrt(abs(defect) / (2.0 * n * np.sin(2.0 * np.pi / n)))
    center = np.asarray(at_xy, dtype=float) - np.array([R, 0.0])
    # counterclockwise loops lower t
    loop = circular_loop(center, R, n, clockwise=defect > 0)
    loop[0] = loop[-1] = at_xy
    return loop, float(n * 2.0 * R * np.sin(np.pi / n))


def _as_path(gamma) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(gamma, AdmissibleCurve):
        return gamma.at
    if callable(gamma):
        return lambda s: np.atleast_2d(as_points(gamma(s)))
    samples = np.atleast_2d(as_points(gamma))
    u = np.linspace(0.0, 1.0, samples.shape[0])

    def path(s):
        return np.stack([np.interp(s, u, samples[:, i]) for i in range(3)], axis=-1)

    return path


def length_d(gamma, m_values: Sequence[int]) -> list[float]:
    """Σ d(γ(s_i), γ(s_{i−1})) over the uniform partition of [0, 1] into m pieces."""
    path = _as_path(gamma)
    out = []
    for m in m_values:
        points = path(np.linspace(0.0, 1.0, int(m) + 1))
        out.append(float(np.sum(dist(points[1:], points[:-1]))))
    return out


def omega_length(gamma: AdmissibleCurve, omega, order: int = GAUSS_ORDER) -> float:
    """Σ_k ∫ ω^{1/4}(γ_k)|γ_k'|_H by Gauss-Legendre on each segment."""
    nodes, weights = roots_legendre(order)
    s = 0.5 * (nodes + 1.0)
    total = 0.0
    for segment in gamma.segments:
        if segment.length == 0.0:
            continue
        values = np.asarray(omega(segment.at(s)), dtype=float)
        total += segment.length * 0.5 * float(np.dot(weights, np.power(np.maximum(values, 0.0), 0.25)))
    return total


def omega_partition_length(gamma, omega, m_values: Sequence[int], cfg=None) -> list[float]:
    """Σ d_ω(γ(s_i), γ(s_{i−1})) over uniform partitions, one value per m."""
    path = _as_path(gamma)
    out = []
    for m in m_values:
        points = path(np.linspace(0.0, 1.0, int(m) + 1))
        out.append(float(sum(david_semmes(a, b, omega, cfg) for a, b in zip(points[:-1], points[1:]))))
    return out


def chain_bound(gamma: AdmissibleCurve, omega, cfg=None) -> float:
    """d_ω(γ(0), γ(1)) / l_ω(γ)."""
    ends = gamma.at([0.0, 1.0])
    length = omega_length(gamma, omega)
    return david_semmes(ends[0], ends[1], omega, cfg) / length if length > 0 else float("inf")
