"""
The smoothed distance λ_g and the log kernels η_g, φ̃ built on it.

λ_g(p, q)⁴ = ∫ J_g(u)·ξ₀(δ_{1/d}(u⁻¹p)) du with d = d(p, q). Substituting
u = p ⋆ δ_d(w)⁻¹ moves the integral to w ∈ B(1/2):

    λ_g(p, q)⁴ = d⁴ ∫ J_g(p ⋆ δ_d(w)⁻¹)·ξ₀(w) dw,

which is evaluated on one fixed set of weighted nodes w_k for every pair,
so all estimates share their random numbers. Everything is vectorized
over (points × poles × nodes) and computed in log space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from heisenqc.construct.bump import SUPPORT, xi0_integral, xi0_profile
from heisenqc.errors import PoleError, QuadratureError
from heisenqc.flow.composed import as_composed
from heisenqc.group.derivatives import Direction
from heisenqc.group.point import as_points, dist, inv, mul
from heisenqc.group.quadrature import STREAM_KERNEL, QuadratureConfig, sphere_samples

log = logging.getLogger(__name__)

# entries of the (points × poles × nodes) array per chunk
_CHUNK = 4_000_000
POLE_TOLERANCE = 1e-12
DEFAULT_KERNEL_NODES = 256


@dataclass(frozen=True, eq=False)
class KernelNodes:
    """Nodes w_k ∈ B(1/2) and weights summing to ∫ξ₀."""
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, n: int = DEFAULT_KERNEL_NODES, cfg: QuadratureConfig | None = None) -> "KernelNodes":
        """Uniform nodes in B(1/2), stratified in r⁴ over n radial shells."""
        cfg = cfg or QuadratureConfig()
        u = cfg.rng(STREAM_KERNEL).random(n)
        radii = SUPPORT * ((np.arange(n) + u) / n) ** 0.25
        directions = sphere_samples(n, cfg)
        nodes = directions * np.stack([radii, radii, radii * radii], axis=-1)
        raw = xi0_profile(radii)
        if raw.sum() <= 0:
            raise QuadratureError("Kernel nodes miss the support of the cutoff", diagnostics={"n": n})
        # ratio estimator: the identity map then gives λ = c₀·d exactly
        weights = raw * (xi0_integral() / raw.sum())
        keep = weights > 0
        return cls(nodes[keep], weights[keep])

    def __len__(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True, eq=False)
class LogKernel:
    """λ_g, η_g and φ̃ for a fixed map g and node set."""
    g: object
    nodes: KernelNodes

    @classmethod
    def for_map(cls, g, cfg: QuadratureConfig | None = None, n_nodes: int = DEFAULT_KERNEL_NODES):
        return cls(g if hasattr(g, "inverse_apply") else as_composed(g), KernelNodes.build(n_nodes, cfg))

    @property
    def _constant_log_jacobian(self) -> float | None:
        g = self.g
        if getattr(g, "has_constant_jacobian", False):
            return float(g.log_jacobian(np.zeros((1, 3)))[0])
        return None

    def log_lambda(self, p, q) -> np.ndarray:
        """log λ_g(p_i, q_j) as an (N, M) array; −inf where p_i = q_j."""
        P = np.atleast_2d(as_points(p))
        Q = np.atleast_2d(as_points(q))
        d = dist(P[:, None, :], Q[None, :, :])
        with np.errstate(divide="ignore"):
            log_d = np.log(d)
        constant = self._constant_log_jacobian
        if constant is not None:
            return log_d + 0.25 * (constant + np.log(xi0_integral()))

        w, log_weights = self.nodes.nodes, np.log(self.nodes.weights)
        n_nodes = w.shape[0]
        out = np.empty_like(d)
        rows = max(1, _CHUNK // max(1, Q.shape[0] * n_nodes))
        for start in range(0, P.shape[0], rows):
            block = d[start:start + rows]
            scale = np.stack([block, block, block * block], axis=-1)[:, :, None, :]
            u = mul(P[start:start + rows, None, None, :], inv(scale * w[None, None, :, :]))
            L = np.asarray(self.g.log_jacobian(u.reshape(-1, 3))).reshape(u.shape[:-1])
            if not np.all(np.isfinite(L)):
                raise QuadratureError(
                    "Non-finite Jacobian inside the kernel quadrature",
                    diagnostics={"bad": int(np.sum(~np.isfinite(L))), "nodes": n_nodes},
                )
            out[start:start + rows] = log_d[start:start + rows] + 0.25 * logsumexp(L + log_weights, axis=-1)
        return out

    def lam(self, p, q) -> np.ndarray:
        return np.exp(self.log_lambda(p, q))

    def poles(self, q) -> np.ndarray:
        """g⁻¹(q), evaluated through the reversed word."""
        return self.g.inverse_apply(np.atleast_2d(as_points(q)))

    def eta_at_poles(self, p, poles) -> np.ndarray:
        """η(p, q) = −log λ_g(p, a) with a = g⁻¹(q) given."""
        return -self.log_lambda(p, poles)

    def eta(self, p, q) -> np.ndarray:
        poles = self.poles(q)
        P = np.atleast_2d(as_points(p))
        if np.any(dist(P[:, None, :], poles[None, :, :]) <= POLE_TOLERANCE):
            raise PoleError("eta evaluated at a pole p = g^{-1}(q)")
        return self.eta_at_poles(P, poles)

    def tilde_phi_at_poles(self, p, poles) -> np.ndarray:
        """η(p, q)·(a⁻¹ ⋆ p)₃ with a = g⁻¹(q); 0 on the pole."""
        P = np.atleast_2d(as_points(p))
        A = np.atleast_2d(as_points(poles))
        vertical = mul(inv(A)[None, :, :], P[:, None, :])[..., 2]
        d = dist(P[:, None, :], A[None, :, :])
        at_pole = d <= POLE_TOLERANCE
        eta = np.where(at_pole, 0.0, self.eta_at_poles(P, A))
        return eta * np.where(at_pole, 0.0, vertical)

    def tilde_phi(self, p, q) -> np.ndarray:
        return self.tilde_phi_at_poles(p, self.poles(q))


def lambda_g(g, p, q, cfg: QuadratureConfig | None = None, kernel: LogKernel | None = None) -> float:
    """λ_g(p, q) at one pair."""
    kernel = kernel or LogKernel.for_map(g, cfg)
    return float(kernel.lam(p, q)[0, 0])


def eta(g, p, q, cfg: QuadratureConfig | None = None, kernel: LogKernel | None = None) -> float:
    kernel = kernel or LogKernel.for_map(g, cfg)
    return float(kernel.eta(p, q)[0, 0])


def tilde_phi(g, p, q, cfg: QuadratureConfig | None = None, kernel: LogKernel | None = None) -> float:
    kernel = kernel or LogKernel.for_map(g, cfg)
    return float(kernel.tilde_phi(p, q)[0, 0])


def _pairwise_log_lambda(kernel: LogKernel, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.array([kernel.log_lambda(pi, qi)[0, 0] for pi, qi in zip(P, Q)])


def lambda_comparability(kernel: LogKernel, p, q) -> np.ndarray:
    """λ_g(p, q) / d(g(p), g(q)) over pairs (p_i, q_i)."""
    P, Q = np.atleast_2d(as_points(p)), np.atleast_2d(as_points(q))
    lam = np.exp(_pairwise_log_lambda(kernel, P, Q))
    return lam / dist(kernel.g.apply(P), kernel.g.apply(Q))


def log_derivative_quotients(kernel: LogKernel, p, q) -> np.ndarray:
    """d(p, q)·max(|X log λ|, |Y log λ|) in the first slot, by central differences."""
    P, Q = np.atleast_2d(as_points(p)), np.atleast_2d(as_points(q))
    d = dist(P, Q)
    out = np.zeros(P.shape[0])
    for direction in (Direction.X, Direction.Y):
        step = np.stack([direction.generator(h) for h in 1e-3 * d])
        plus = _pairwise_log_lambda(kernel, mul(P, step), Q)
        minus = _pairwise_log_lambda(kernel, mul(P, -step), Q)
        out = np.maximum(out, np.abs(plus - minus) / (2e-3 * d))
    return out * d
