"""
The potential φ = φ¹ − φ² generated by a map g and a density ψ.

φ¹(p) = ∫ φ̃(p, q) ψ(q) dq is a weighted sum over the nodes of ψ, with the
poles g⁻¹(q_i) computed once. φ² = c₃ − 4c₁·y + 4c₂·x is the affine
potential whose field at 0 is (c₁, c₂, c₃) = v_{φ¹}(0), so v_φ(0) = 0.
"""

from __future__ import annotations

import logging

import numpy as np

from heisenqc.construct.kernel import DEFAULT_KERNEL_NODES, LogKernel
from heisenqc.contact.field import ContactField, PotentialField
from heisenqc.contact.tabulated import TabulatedPotential
from heisenqc.errors import EvaluationError
from heisenqc.group.derivatives import hgradient
from heisenqc.group.point import as_points
from heisenqc.group.quadrature import QuadratureConfig
from heisenqc.potential.logpot import LogPotential, eval_potential_many
from heisenqc.potential.measure import Measure

log = logging.getLogger(__name__)


class ConstructedPotential(PotentialField):
    """φ_{g,ψ} as a PotentialField; derivatives by finite differences."""

    def __init__(
        self,
        g,
        psi: Measure,
        cfg: QuadratureConfig | None = None,
        n_nodes: int = DEFAULT_KERNEL_NODES,
        kernel: LogKernel | None = None,
    ):
        cfg = cfg or QuadratureConfig()
        self.g = g
        self.psi = psi
        self.kernel = kernel or LogKernel.for_map(g, cfg, n_nodes)
        q, weights = psi.nodes()
        self._weights = weights
        self._poles = self.kernel.poles(q) if weights.size else np.zeros((0, 3))
        super().__init__(self._read_value, gradient=self._read_gradient, name="phi[g,psi]", cfg=cfg)
        self.c = self._linear_correction()
        log.info("constructed potential over %d poles: c=%s", weights.size, list(self.c))

    def phi1(self, points) -> np.ndarray:
        p = np.atleast_2d(as_points(points))
        if self._weights.size == 0:
            return np.zeros(p.shape[0])
        return self.kernel.tilde_phi_at_poles(p, self._poles) @ self._weights

    def phi2(self, points) -> np.ndarray:
        p = np.atleast_2d(as_points(points))
        c1, c2, c3 = self.c
        return c3 - 4.0 * c1 * p[:, 1] + 4.0 * c2 * p[:, 0]

    def _phi1_gradient(self, points) -> np.ndarray:
        p = np.atleast_2d(as_points(points))
        if self._weights.size == 0:
            return np.zeros((p.shape[0], 3))
        return hgradient(self.phi1, p, self.cfg)

    def _linear_correction(self) -> tuple[float, float, float]:
        origin = np.zeros((1, 3))
        grad = self._phi1_gradient(origin)[0]
        c = (-0.25 * grad[1], 0.25 * grad[0], float(self.phi1(origin)[0]))
        if not np.all(np.isfinite(c)):
            raise EvaluationError(f"Field of the integral potential is not finite at 0: {c}")
        return tuple(float(x) for x in c)

    def _read_value(self, points):
        return self.phi1(points) - self.phi2(points)

    def _read_gradient(self, points):
        c1, c2, _ = self.c
        return self._phi1_gradient(points) - np.array([4.0 * c2, -4.0 * c1, 0.0])

    def describe(self) -> dict:
        return {
            "c": list(self.c),
            "poles": int(self._weights.size),
            "kernel_nodes": len(self.kernel.nodes),
            "map": self.g.describe() if hasattr(self.g, "describe") else repr(self.g),
        }


def phi1(g, psi: Measure, p, cfg: QuadratureConfig | None = None) -> np.ndarray:
    return ConstructedPotential(g, psi, cfg).phi1(p)


def phi2_and_assemble(g, psi: Measure, cfg: QuadratureConfig | None = None, **kwargs) -> ConstructedPotential:
    return ConstructedPotential(g, psi, cfg, **kwargs)


def zeta(phi: ConstructedPotential, points) -> np.ndarray:
    """div_H v_φ − Λ_ψ∘g at the given points."""
    pts = np.atleast_2d(as_points(points))
    divergence = ContactField(phi).divergence(pts)
    values, _ = eval_potential_many(LogPotential(phi.psi, precomposition=phi.g), pts, phi.cfg)
    return divergence - values


def tabulate_constructed(phi: ConstructedPotential, grid) -> PotentialField:
    """φ¹ read from a box table (exact outside it), corrected by the affine
    potential fitted at the table node 0 so that the tabulated field still
    vanishes there."""
    table = TabulatedPotential(PotentialField(phi.phi1, name="phi1", cfg=phi.cfg), grid, outside=True)
    origin = np.zeros((1, 3))
    grad = table.horizontal_gradient(origin)[0]
    c1, c2, c3 = -0.25 * grad[1], 0.25 * grad[0], float(table(origin)[0])
    shift = np.array([4.0 * c2, -4.0 * c1, 0.0])

    def evaluate(p):
        return table(p) - (c3 - 4.0 * c1 * p[:, 1] + 4.0 * c2 * p[:, 0])

    def gradient(p):
        return table.horizontal_gradient(p) - shift

    return PotentialField(evaluate, gradient, table.horizontal_hessian, name="tabulated phi[g,psi]", cfg=phi.cfg)
