"""
Truncation of potentials far from the origin.

G_l(r) = P(G̃_l(r)) between l and l', 1 below l and 0 above l', with
P(z) = 6z⁵ − 15z⁴ + 10z³, G̃_l(r) = 1 − (log log r − log log l)/l and
log l' = e^l·log l. Everything is evaluated through log r so that l' may
lie far beyond the float range.
"""

from __future__ import annotations

import numpy as np

from heisenqc.contact.field import PotentialField
from heisenqc.errors import DomainError
from heisenqc.group.point import as_points

# sup |P'| on [0, 1]
PROFILE_DERIVATIVE_BOUND = 15.0 / 8.0


def smoothstep(z):
    z = np.clip(z, 0.0, 1.0)
    return z ** 3 * (10.0 - 15.0 * z + 6.0 * z * z)


def smoothstep_derivative(z):
    z = np.asarray(z, dtype=float)
    inside = (z > 0.0) & (z < 1.0)
    return np.where(inside, 30.0 * z * z * (1.0 - z) ** 2, 0.0)


def _check_level(l: float) -> None:
    if not l >= np.e:
        raise DomainError(f"Truncation level must be at least e, got {l}")


def log_outer_level(l: float) -> float:
    """log l' = e^l·log l."""
    _check_level(l)
    return float(np.exp(l) * np.log(l))


def inner_profile(l: float, log_r) -> np.ndarray:
    """G̃_l as a function of log r, valid for r ≥ l."""
    _check_level(l)
    log_r = np.asarray(log_r, dtype=float)
    return 1.0 - (np.log(log_r) - np.log(np.log(l))) / l


def truncation_profile(l: float, r=None, *, log_r=None) -> np.ndarray:
    """G_l at r (or at exp(log_r))."""
    _check_level(l)
    with np.errstate(divide="ignore"):
        lr = np.log(np.asarray(r, dtype=float)) if log_r is None else np.asarray(log_r, dtype=float)
    out = np.ones_like(lr)
    beyond = lr > np.log(l)
    if np.any(beyond):
        out[beyond] = smoothstep(inner_profile(l, lr[beyond]))
    return out


def truncation_derivative(l: float, r) -> np.ndarray:
    """G_l'(r) = P'(G̃_l(r))·(−1/(l·r·log r)) for r > l, else 0."""
    _check_level(l)
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    beyond = r > l
    if np.any(beyond):
        lr = np.log(r[beyond])
        out[beyond] = smoothstep_derivative(inner_profile(l, lr)) * (-1.0 / (l * r[beyond] * lr))
    return out


def derivative_bound_constant(l: float, log_r_max: float | None = None, n: int = 4000) -> float:
    """Smallest C with |G_l'(r)| ≤ C/(l·r·log r), swept on a log-spaced grid in r."""
    lo = np.log(np.log(l))
    hi = np.log(log_outer_level(l) if log_r_max is None else log_r_max)
    log_r = np.exp(np.linspace(lo, hi, n))
    r = np.exp(np.minimum(log_r, 700.0))
    finite = log_r < 700.0
    g = np.abs(truncation_derivative(l, r[finite]))
    envelope = 1.0 / (l * r[finite] * log_r[finite])
    ratio = np.divide(g, envelope, out=np.zeros_like(g), where=envelope > 0)
    # beyond float range the ratio is |P'(G̃)| exactly
    tail = smoothstep_derivative(inner_profile(l, log_r[~finite]))
    return float(max(ratio.max(initial=0.0), tail.max(initial=0.0)))


def truncate(phi: PotentialField, l: float) -> PotentialField:
    """φ_l(p) = G_l(‖p‖⁴)·φ(p)."""
    _check_level(l)

    def norm4(p):
        rho2 = p[:, 0] ** 2 + p[:, 1] ** 2
        return rho2 * rho2 + p[:, 2] ** 2

    def evaluate(p):
        return truncation_profile(l, norm4(p)) * phi(p)

    def gradient(p):
        p = as_points(p)
        x, y, t = p[:, 0], p[:, 1], p[:, 2]
        rho2 = x * x + y * y
        n4 = rho2 * rho2 + t * t
        g = truncation_profile(l, n4)
        dg = truncation_derivative(l, n4)
        # X‖p‖⁴ = 4xρ² + 4yt, Y‖p‖⁴ = 4yρ² − 4xt, T‖p‖⁴ = 2t
        dn = np.stack([4.0 * x * rho2 + 4.0 * y * t, 4.0 * y * rho2 - 4.0 * x * t, 2.0 * t], axis=-1)
        return g[:, None] * phi.horizontal_gradient(p) + (dg * phi(p))[:, None] * dn

    return PotentialField(evaluate, gradient, name=f"truncate({phi.name}, {l:g})", cfg=phi.cfg)
