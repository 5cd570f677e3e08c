"""
Fixed-step RK4 integration of contact flows.

The state can be augmented with the horizontal differential A = D_H f_s,
A' = D_H v(f_s)·A from the identity, and with L = ∫ Tφ(f_σ) dσ, so that
det A and exp(L) give two independent routes to the Jacobian.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from heisenqc.contact.field import ContactField
from heisenqc.errors import DomainError, EvaluationError, FlowEscapeError
from heisenqc.group.point import Point, as_points, gauge

log = logging.getLogger(__name__)

DEFAULT_STEPS = 256


@dataclass(frozen=True)
class HorizontalDifferential:
    """2×2 matrix of D_H f in the X, Y frame."""
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_matrix(cls, matrix) -> "HorizontalDifferential":
        m = np.asarray(matrix, dtype=float).reshape(2, 2)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def jacobian(self) -> float:
        return self.det ** 2

    @property
    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.as_matrix(), 2))

    @property
    def dilatation(self) -> float:
        """|A|²/det A."""
        return self.operator_norm ** 2 / self.det


def steps_for(s: float, step: float | None) -> int:
    if step is None:
        return DEFAULT_STEPS
    if step <= 0:
        raise DomainError(f"Integrator step must be positive, got {step}")
    return max(1, int(np.ceil(abs(s) / step - 1e-9)))


def _checked(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"Non-finite {what} during flow integration")
    return values


def _check_escape(state: np.ndarray, history, radius_bound, k: int, h: float) -> None:
    if radius_bound is None:
        return
    norms = gauge(state)
    if np.any(norms > radius_bound):
        worst = int(np.argmax(norms))
        partial = None if history is None else np.asarray(history)[:, worst]
        raise FlowEscapeError(
            f"Trajectory left B({radius_bound:g}) at sigma={k * h:.6g}",
            trajectory=partial,
        )


def rk4_points(
    field: ContactField,
    points,
    s: float,
    n_steps: int,
    radius_bound: float | None = None,
    record: bool = False,
):
    """Endpoints of the time-s flow for a batch of points (and the history if record)."""
    state = np.array(np.atleast_2d(as_points(points)), dtype=float)
    h = s / n_steps
    history = [state.copy()] if record else None
    if s != 0.0:
        for k in range(1, n_steps + 1):
            k1 = _checked(field(state), "velocity")
            k2 = _checked(field(state + 0.5 * h * k1), "velocity")
            k3 = _checked(field(state + 0.5 * h * k2), "velocity")
            k4 = _checked(field(state + h * k3), "velocity")
            state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if record:
                history.append(state.copy())
            _check_escape(state, history, radius_bound, k, h)
    elif record:
        history = [state.copy() for _ in range(n_steps + 1)]
    return (state, np.asarray(history)) if record else state


def rk4_with_differential(
    field: ContactField,
    points,
    s: float,
    n_steps: int,
    radius_bound: float | None = None,
    record: bool = False,
    differential: bool = True,
):
    """Co-integrate (f_s(p), D_H f_s(p), ∫₀ˢ Tφ(f_σ(p)) dσ) for a batch.

    Returns (endpoints (N,3), A (N,2,2), L (N,)) and, when record, the
    history of (sigma, points, A) rows. With differential=False only the
    trajectory and L are integrated and A stays the identity.
    """
    p = np.array(np.atleast_2d(as_points(points)), dtype=float)
    n = p.shape[0]
    A = np.tile(np.eye(2), (n, 1, 1))
    L = np.zeros(n)
    h = s / n_steps

    def rhs(q, M):
        if not differential:
            vel, div = field.velocity_and_divergence(q)
            return _checked(vel, "velocity"), np.zeros_like(M), div
        vel, D, div = field.velocity_and_differential(q)
        _checked(vel, "velocity")
        _checked(D, "horizontal differential")
        return vel, D @ M, div

    history = [(0.0, p.copy(), A.copy())] if record else None
    if s != 0.0:
        for k in range(1, n_steps + 1):
            a1, b1, c1 = rhs(p, A)
            a2, b2, c2 = rhs(p + 0.5 * h * a1, A + 0.5 * h * b1)
            a3, b3, c3 = rhs(p + 0.5 * h * a2, A + 0.5 * h * b2)
            a4, b4, c4 = rhs(p + h * a3, A + h * b3)
            p = p + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            A = A + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            L = L + (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            if record:
                history.append((k * h, p.copy(), A.copy()))
            _check_escape(p, None, radius_bound, k, h)
    elif record:
        history = [(0.0, p.copy(), A.copy()) for _ in range(n_steps + 1)]
    return (p, A, L, history) if record else (p, A, L)


@dataclass(frozen=True, eq=False)
class FlowMap:
    """Time-s flow of a contact field, RK4 with a fixed number of steps."""
    field: ContactField
    time: float
    steps: int = DEFAULT_STEPS
    radius_bound: float | None = None

    has_constant_jacobian = False

    @classmethod
    def with_step(cls, field: ContactField, time: float, step: float | None = None, radius_bound=None):
        return cls(field, float(time), steps_for(time, step), radius_bound)

    @property
    def step(self) -> float:
        return abs(self.time) / self.steps

    def apply(self, points) -> np.ndarray:
        return rk4_points(self.field, points, self.time, self.steps, self.radius_bound)

    def inverse(self) -> "FlowMap":
        return FlowMap(self.field, -self.time, self.steps, self.radius_bound)

    def inverse_apply(self, points) -> np.ndarray:
        return self.inverse().apply(points)

    def trajectory(self, p) -> np.ndarray:
        _, history = rk4_points(self.field, p, self.time, self.steps, self.radius_bound, record=True)
        return history[:, 0, :]

    def with_differential(self, points):
        return rk4_with_differential(self.field, points, self.time, self.steps, self.radius_bound)

    def horizontal_differential(self, points) -> np.ndarray:
        return self.with_differential(points)[1]

    def log_jacobian(self, points) -> np.ndarray:
        """log J = 2∫₀ˢ Tφ(f_σ(p)) dσ."""
        L = rk4_with_differential(
            self.field, points, self.time, self.steps, self.radius_bound, differential=False
        )[2]
        return 2.0 * L

    def describe(self) -> dict:
        return {"kind": "flow", "field": self.field.source.name, "time": self.time, "steps": self.steps}


def integrate(v: ContactField, p, s: float, step: float | None = None, radius_bound: float | None = None):
    """Trajectory of p under the time-s flow, shape (steps + 1, 3)."""
    n = steps_for(s, step)
    _, history = rk4_points(v, np.asarray(p, dtype=float).reshape(1, 3), s, n, radius_bound, record=True)
    return history[:, 0, :]


def flow_with_differential(v: ContactField, p, s: float, step: float | None = None):
    """(f_s(p), D_H f_s(p))."""
    n = steps_for(s, step)
    end, A, _ = rk4_with_differential(v, np.asarray(p, dtype=float).reshape(1, 3), s, n)
    return Point.from_array(end[0]), HorizontalDifferential.from_matrix(A[0])


def jacobian_variational(v: ContactField, p, s: float, step: float | None = None) -> float:
    """exp(2∫₀ˢ Tφ(f_σ(p)) dσ), the integral taken along the RK4 trajectory."""
    n = steps_for(s, step)
    _, _, L = rk4_with_differential(v, np.asarray(p, dtype=float).reshape(1, 3), s, n)
    return float(np.exp(2.0 * L[0]))


def jacobian_determinant(v: ContactField, p, s: float, step: float | None = None) -> float:
    """(det D_H f_s(p))²."""
    return flow_with_differential(v, p, s, step)[1].jacobian


def integration_error(v: ContactField, p, s: float, step: float | None = None, *, steps: int | None = None) -> float:
    """Richardson estimate ‖f_s^{(n)} − f_s^{(2n)}‖/15 of the RK4 endpoint error.

    An explicit step count takes precedence over the step size.
    """
    n = steps if steps is not None else steps_for(s, step)
    pts = np.atleast_2d(as_points(p))
    coarse = rk4_points(v, pts, s, n)
    fine = rk4_points(v, pts, s, 2 * n)
    return float(np.max(np.linalg.norm(coarse - fine, axis=-1)) / 15.0)


def trajectory_rows(
    v: ContactField, p, s: float, step: float | None = None, *, steps: int | None = None
) -> list[list[float]]:
    """Rows (sigma, x, y, t, m11, m12, m21, m22) for the trajectory dump."""
    n = steps if steps is not None else steps_for(s, step)
    *_, history = rk4_with_differential(v, np.asarray(p, dtype=float).reshape(1, 3), s, n, record=True)
    return [[float(sigma), *pts[0].tolist(), *A[0].ravel().tolist()] for sigma, pts, A in history]
