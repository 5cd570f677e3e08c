"""
Closed-form potentials with hand-supplied derivatives.

Each factory returns a PotentialField. Where a Hessian is omitted it is
obtained by differencing the closed-form gradient.
"""

from __future__ import annotations

import numpy as np

from heisenqc.contact.field import PotentialField
from heisenqc.errors import ConfigError
from heisenqc.group.quadrature import QuadratureConfig


def _zeros_hessian(p: np.ndarray) -> np.ndarray:
    return np.zeros((p.shape[0], 2, 2))


def constant(c: float = 1.0, cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ ≡ c; for c = 1 the field is T."""
    return PotentialField(
        lambda p: np.full(p.shape[0], float(c)),
        gradient=lambda p: np.zeros((p.shape[0], 3)),
        hessian=_zeros_hessian,
        name=f"constant({c:g})",
        cfg=cfg,
    )


def coordinate_x(cfg: QuadratureConfig | None = None) -> PotentialField:
    return PotentialField(
        lambda p: p[:, 0].copy(),
        gradient=lambda p: np.tile([1.0, 0.0, 0.0], (p.shape[0], 1)),
        hessian=_zeros_hessian,
        name="x",
        cfg=cfg,
    )


def vertical(cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ = t: Xφ = 2y, Yφ = −2x, Tφ = 1."""

    def gradient(p):
        return np.stack([2.0 * p[:, 1], -2.0 * p[:, 0], np.ones(p.shape[0])], axis=-1)

    def hessian(p):
        out = np.zeros((p.shape[0], 2, 2))
        out[:, 0, 1] = -2.0
        out[:, 1, 0] = 2.0
        return out

    return PotentialField(lambda p: p[:, 2].copy(), gradient, hessian, name="t", cfg=cfg)


def quadratic_x(cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ = x²; ZZφ = 1/2."""

    def gradient(p):
        return np.stack([2.0 * p[:, 0], np.zeros(p.shape[0]), np.zeros(p.shape[0])], axis=-1)

    def hessian(p):
        out = np.zeros((p.shape[0], 2, 2))
        out[:, 0, 0] = 2.0
        return out

    return PotentialField(lambda p: p[:, 0] ** 2, gradient, hessian, name="x^2", cfg=cfg)


def translation_generator(a: float, b: float, c: float, cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ = c − 4a·y + 4b·x, whose time-s flow is p ↦ (sa, sb, sc) ⋆ p."""

    def evaluate(p):
        return c - 4.0 * a * p[:, 1] + 4.0 * b * p[:, 0]

    def gradient(p):
        return np.tile([4.0 * b, -4.0 * a, 0.0], (p.shape[0], 1))

    return PotentialField(evaluate, gradient, _zeros_hessian, name=f"translation({a:g},{b:g},{c:g})", cfg=cfg)


def _norm4(p: np.ndarray):
    rho2 = p[:, 0] ** 2 + p[:, 1] ** 2
    return rho2, rho2 * rho2 + p[:, 2] ** 2


def log_gauge(cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ = −2 log‖p‖."""

    def evaluate(p):
        return -0.5 * np.log(_norm4(p)[1])

    def gradient(p):
        x, y, t = p[:, 0], p[:, 1], p[:, 2]
        rho2, n4 = _norm4(p)
        return np.stack(
            [(-2.0 * x * rho2 - 2.0 * y * t) / n4, (-2.0 * y * rho2 + 2.0 * x * t) / n4, -t / n4], axis=-1
        )

    return PotentialField(evaluate, gradient, name="-2 log|p|", cfg=cfg)


def radial_stretch(cfg: QuadratureConfig | None = None) -> PotentialField:
    """φ = −2t·log‖p‖, whose flow is essentially the radial stretch."""

    def evaluate(p):
        return -0.5 * p[:, 2] * np.log(_norm4(p)[1])

    def gradient(p):
        x, y, t = p[:, 0], p[:, 1], p[:, 2]
        rho2, n4 = _norm4(p)
        dx = -2.0 * t * x * rho2 / n4
        dy = -2.0 * t * y * rho2 / n4
        dt = -0.5 * np.log(n4) - t * t / n4
        return np.stack([dx + 2.0 * y * dt, dy - 2.0 * x * dt, dt], axis=-1)

    return PotentialField(evaluate, gradient, name="-2t log|p|", cfg=cfg)


CATALOGUE = {
    "constant": constant,
    "x": coordinate_x,
    "t": vertical,
    "x2": quadratic_x,
    "log-gauge": log_gauge,
    "radial-stretch": radial_stretch,
}


def from_name(name: str, params: dict | None = None, cfg: QuadratureConfig | None = None) -> PotentialField:
    """Build a catalogue potential by name; `translation` takes a, b, c params."""
    params = dict(params or {})
    if name == "translation":
        return translation_generator(params.get("a", 0.0), params.get("b", 0.0), params.get("c", 0.0), cfg)
    if name == "constant":
        return constant(params.get("c", 1.0), cfg)
    try:
        factory = CATALOGUE[name]
    except KeyError as e:
        raise ConfigError(f"Unknown potential '{name}'. Known: {sorted(CATALOGUE) + ['translation']}") from e
    return factory(cfg)
