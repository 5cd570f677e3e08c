"""
Heisenberg group arithmetic and the gauge metric.

Points are handled either as `Point` values or as float arrays whose last
axis has length 3 (x, y, t). Every function accepts both and returns arrays,
so that batches of points go through numpy in one call.

Responsibilities:
- Group law, inverse, dilations.
- Korányi gauge and the left-invariant distance.
- Left-invariant frame X, Y, T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heisenqc.errors import DomainError, EvaluationError


@dataclass(frozen=True)
class Point:
    """A group element (x, y, t)."""
    x: float
    y: float
    t: float

    def __post_init__(self):
        for name in ("x", "y", "t"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise DomainError(f"Point coordinate {name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.t], dtype=dtype or float)

    def __mul__(self, other: "Point") -> "Point":
        return Point.from_array(mul(self, other))

    def inverse(self) -> "Point":
        return Point(-self.x, -self.y, -self.t)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.t]

    @classmethod
    def from_array(cls, values) -> "Point":
        arr = np.asarray(values, dtype=float).reshape(3)
        return cls(arr[0], arr[1], arr[2])


IDENTITY = Point(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Tangent:
    """Tangent vector a∂x + b∂y + c∂t based at a point."""
    a: float
    b: float
    c: float
    base: Point

    @property
    def horizontal_norm(self) -> float:
        # coefficients of X and Y coincide with the ∂x and ∂y coefficients
        return float(np.hypot(self.a, self.b))

    def vertical_defect(self) -> float:
        """Distance of the ∂t coefficient from the horizontal plane at the base."""
        return self.c - (2.0 * self.base.y * self.a - 2.0 * self.base.x * self.b)


def as_points(p) -> np.ndarray:
    """Coerce a Point or array-like into a float array of shape (..., 3)."""
    arr = np.asarray(p, dtype=float)
    if arr.shape == () or arr.shape[-1] != 3:
        raise DomainError(f"Expected points with trailing dimension 3, got shape {arr.shape}")
    return arr


def mul(p, q) -> np.ndarray:
    """Group product (x1+x2, y1+y2, t1+t2+2(x2·y1 − x1·y2))."""
    p, q = as_points(p), as_points(q)
    x1, y1, t1 = p[..., 0], p[..., 1], p[..., 2]
    x2, y2, t2 = q[..., 0], q[..., 1], q[..., 2]
    return np.stack([x1 + x2, y1 + y2, t1 + t2 + 2.0 * (x2 * y1 - x1 * y2)], axis=-1)


def inv(p) -> np.ndarray:
    return -as_points(p)


def gauge(p) -> np.ndarray:
    """Korányi gauge ((x²+y²)² + t²)^{1/4}.

    Computed as sqrt(hypot(x²+y², t)) so that only genuinely huge inputs
    overflow; overflow is an error.
    """
    p = as_points(p)
    with np.errstate(over="ignore"):
        rho2 = p[..., 0] ** 2 + p[..., 1] ** 2
        value = np.sqrt(np.hypot(rho2, p[..., 2]))
    if not np.all(np.isfinite(value)):
        raise EvaluationError("Gauge overflow")
    return value


def dilate(r, p) -> np.ndarray:
    """δ_r(x, y, t) = (rx, ry, r²t)."""
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise DomainError(f"Dilation factor must be positive, got {r}")
    p = as_points(p)
    r = r[..., None] if r.ndim else r
    scale = np.concatenate(
        [np.broadcast_to(r, p[..., :2].shape), np.broadcast_to(r * r, p[..., 2:].shape)], axis=-1
    )
    return p * scale


def dist(p, q) -> np.ndarray:
    """d(p, q) = ‖q⁻¹ ⋆ p‖."""
    return gauge(mul(inv(q), p))


def frame(p) -> tuple[Tangent, Tangent, Tangent]:
    """Left-invariant frame X = ∂x + 2y∂t, Y = ∂y − 2x∂t, T = ∂t at p."""
    base = p if isinstance(p, Point) else Point.from_array(p)
    return (
        Tangent(1.0, 0.0, 2.0 * base.y, base),
        Tangent(0.0, 1.0, -2.0 * base.x, base),
        Tangent(0.0, 0.0, 1.0, base),
    )


def frame_to_cartesian(points, coefficients) -> np.ndarray:
    """Convert frame coefficients (α, β, γ) of αX + βY + γT into ∂x, ∂y, ∂t components."""
    points = as_points(points)
    coefficients = np.asarray(coefficients, dtype=float)
    a, b, c = coefficients[..., 0], coefficients[..., 1], coefficients[..., 2]
    x, y = points[..., 0], points[..., 1]
    return np.stack([a, b, c + 2.0 * y * a - 2.0 * x * b], axis=-1)
