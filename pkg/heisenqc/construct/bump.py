"""The fixed cutoff ξ₀: 1 on B(1/4), 0 outside B(1/2), smooth in between."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from heisenqc.group.point import gauge
from heisenqc.group.quadrature import UNIT_BALL_VOLUME

PLATEAU = 0.25
SUPPORT = 0.5


def _flat(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(z > 0.0, np.exp(-1.0 / np.where(z > 0.0, z, 1.0)), 0.0)


def smooth_transition(z):
    """C^∞ step: 0 for z ≤ 0, 1 for z ≥ 1."""
    a, b = _flat(z), _flat(1.0 - np.asarray(z, dtype=float))
    return a / (a + b)


def xi0_profile(r):
    """ξ₀ as a function of the gauge radius."""
    z = (np.asarray(r, dtype=float) - PLATEAU) / (SUPPORT - PLATEAU)
    return 1.0 - smooth_transition(z)


def xi0(points) -> np.ndarray:
    return xi0_profile(gauge(points))


@lru_cache(maxsize=1)
def xi0_integral() -> float:
    """∫ξ₀ = ∫₀^{1/2} ξ₀(r)·4|B(1)|r³ dr."""
    inner = UNIT_BALL_VOLUME * PLATEAU ** 4
    shell, _ = quad(lambda r: float(xi0_profile(r)) * 4.0 * UNIT_BALL_VOLUME * r ** 3, PLATEAU, SUPPORT)
    return inner + shell


def kernel_scale() -> float:
    """c₀ = (∫ξ₀)^{1/4}, the value of λ/d for the identity map."""
    return xi0_integral() ** 0.25
