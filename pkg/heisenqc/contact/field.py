"""
Contact generating potentials and the vector fields they produce.

Responsibilities:
- PotentialField: φ with optional closed-form gradient (Xφ, Yφ, Tφ) and
  horizontal Hessian; finite differences fill in what is missing.
- ContactField: v_φ = −¼Yφ·X + ¼Xφ·Y + φ·T, its Cartesian components,
  horizontal differential D_H v and divergence Tφ.
- Empirical growth envelopes of φ and Zφ.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from heisenqc.group.derivatives import Direction, hderiv, hgradient
from heisenqc.group.point import as_points, dilate, frame_to_cartesian
from heisenqc.group.quadrature import QuadratureConfig, sphere_grid

log = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


class PotentialField:
    """A contact generating potential φ.

    Args:
        evaluate: φ on arrays of shape (N, 3), returning (N,).
        gradient: optional closed form returning (N, 3) = (Xφ, Yφ, Tφ).
        hessian: optional closed form returning (N, 2, 2) with
            H[i, j] = X_i(X_j φ), X_1 = X, X_2 = Y.
        name: label used in reports.
        cfg: finite-difference settings for missing derivatives.
    """

    def __init__(
        self,
        evaluate: ArrayFn,
        gradient: Optional[ArrayFn] = None,
        hessian: Optional[ArrayFn] = None,
        name: str = "potential",
        cfg: QuadratureConfig | None = None,
    ):
        self._evaluate = evaluate
        self._gradient = gradient
        self._hessian = hessian
        self.name = name
        self.cfg = cfg or QuadratureConfig()

    @property
    def has_analytic_gradient(self) -> bool:
        return self._gradient is not None

    def __call__(self, points) -> np.ndarray:
        points = as_points(points)
        return np.asarray(self._evaluate(np.atleast_2d(points)), dtype=float).reshape(points.shape[:-1])

    def horizontal_gradient(self, points) -> np.ndarray:
        """(Xφ, Yφ, Tφ) with shape (N, 3)."""
        points = np.atleast_2d(as_points(points))
        if self._gradient is not None:
            return np.asarray(self._gradient(points), dtype=float)
        return hgradient(self._evaluate, points, self.cfg)

    def horizontal_hessian(self, points) -> np.ndarray:
        """H[i, j] = X_i(X_j φ) with shape (N, 2, 2)."""
        points = np.atleast_2d(as_points(points))
        if self._hessian is not None:
            return np.asarray(self._hessian(points), dtype=float)
        component = [lambda q, j=j: self.horizontal_gradient(q)[:, j] for j in range(2)]
        out = np.empty((points.shape[0], 2, 2))
        for i, direction in enumerate((Direction.X, Direction.Y)):
            for j in range(2):
                out[:, i, j] = hderiv(component[j], points, direction, self.cfg)
        return out

    def __repr__(self) -> str:
        return f"PotentialField({self.name!r})"


@dataclass(frozen=True)
class ContactField:
    """The field v_φ; components are always re-derived from the source potential."""
    source: PotentialField

    def frame_components(self, points) -> np.ndarray:
        """(v₁, v₂, v₃) as coefficients of X, Y, T: (−¼Yφ, ¼Xφ, φ)."""
        points = np.atleast_2d(as_points(points))
        grad = self.source.horizontal_gradient(points)
        return np.stack([-0.25 * grad[:, 1], 0.25 * grad[:, 0], self.source(points)], axis=-1)

    def __call__(self, points) -> np.ndarray:
        """Cartesian components (v₁, v₂, φ + 2y·v₁ − 2x·v₂)."""
        points = np.atleast_2d(as_points(points))
        return frame_to_cartesian(points, self.frame_components(points))

    def horizontal_differential(self, points) -> np.ndarray:
        """D_H v = [[Xv₁, Yv₁], [Xv₂, Yv₂]] with shape (N, 2, 2)."""
        H = self.source.horizontal_hessian(points)
        out = np.empty_like(H)
        out[:, 0, 0] = -0.25 * H[:, 0, 1]   # X(−¼Yφ)
        out[:, 0, 1] = -0.25 * H[:, 1, 1]   # Y(−¼Yφ)
        out[:, 1, 0] = 0.25 * H[:, 0, 0]    # X(¼Xφ)
        out[:, 1, 1] = 0.25 * H[:, 1, 0]    # Y(¼Xφ)
        return out

    def divergence(self, points) -> np.ndarray:
        return self.source.horizontal_gradient(points)[:, 2]

    def velocity_and_divergence(self, points):
        """Cartesian velocity and Tφ from one gradient evaluation."""
        points = np.atleast_2d(as_points(points))
        grad = self.source.horizontal_gradient(points)
        frame = np.stack([-0.25 * grad[:, 1], 0.25 * grad[:, 0], self.source(points)], axis=-1)
        return frame_to_cartesian(points, frame), grad[:, 2]

    def velocity_and_differential(self, points):
        """Cartesian velocity, D_H v and Tφ in one pass."""
        points = np.atleast_2d(as_points(points))
        grad = self.source.horizontal_gradient(points)
        frame = np.stack([-0.25 * grad[:, 1], 0.25 * grad[:, 0], self.source(points)], axis=-1)
        return frame_to_cartesian(points, frame), self.horizontal_differential(points), grad[:, 2]


def field_from_potential(phi: PotentialField) -> ContactField:
    return ContactField(phi)


def horizontal_divergence(v: ContactField, p) -> float | np.ndarray:
    """tr D_H v = Tφ."""
    points = as_points(p)
    value = v.divergence(np.atleast_2d(points))
    return value if points.ndim > 1 else float(value[0])


def divergence_crosscheck(v: ContactField, points) -> np.ndarray:
    """|tr D_H v − Tφ| with D_H v from second derivatives."""
    points = np.atleast_2d(as_points(points))
    D = v.horizontal_differential(points)
    return np.abs(D[:, 0, 0] + D[:, 1, 1] - v.divergence(points))


def growth_constants(
    phi: PotentialField,
    radii: Sequence[float] | None = None,
    n_angle: int = 12,
    n_height: int = 7,
) -> tuple[float, float]:
    """Smallest C with |φ| ≤ C(1+‖p‖²log‖p‖) and |Zφ| ≤ C(1+‖p‖log‖p‖) on sampled spheres."""
    radii = np.geomspace(1.0, 1e3, 13) if radii is None else np.asarray(radii, dtype=float)
    directions = sphere_grid(n_angle, n_height)
    c_phi = c_z = 0.0
    for r in radii:
        points = dilate(r, directions)
        grad = phi.horizontal_gradient(points)
        z_mod = 0.5 * np.hypot(grad[:, 0], grad[:, 1])
        lr = np.log(r) if r > 1 else 0.0
        c_phi = max(c_phi, float(np.max(np.abs(phi(points)))) / (1.0 + r * r * lr))
        c_z = max(c_z, float(np.max(z_mod)) / (1.0 + r * lr))
    log.debug("growth constants %s: C_phi=%g C_Z=%g", phi.name, c_phi, c_z)
    return c_phi, c_z
