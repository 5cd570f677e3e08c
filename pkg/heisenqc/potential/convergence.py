"""
Convergence checks for the two regularizations of a measure.

Both report ∫_{B(R)} |e^{βΛ_k} − e^{βΛ}| along a ladder of k, where Λ_k is
the potential of the smoothed measure (regularize) or of the restricted
measure (restrict).
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from heisenqc.group.quadrature import QuadratureConfig, sample_ball, UNIT_BALL_VOLUME
from heisenqc.potential.logpot import LogPotential, eval_potential_many
from heisenqc.potential.measure import Measure, regularize, restrict

log = logging.getLogger(__name__)


def _exp_weights(mu: Measure, points: np.ndarray, beta: float) -> np.ndarray:
    values, _ = eval_potential_many(LogPotential(mu), points)
    with np.errstate(over="ignore"):
        return np.exp(beta * values)


def regularization_errors(
    mu: Measure,
    beta: float,
    ks: Sequence[int],
    cfg: QuadratureConfig | None = None,
    radius: float = 1.0,
) -> list[float]:
    """∫_{B(radius)} |e^{βΛ_k} − e^{βΛ}| for each smoothing index k."""
    cfg = cfg or QuadratureConfig()
    points = sample_ball(np.zeros(3), radius, cfg.mc_samples, cfg)
    volume = UNIT_BALL_VOLUME * radius ** 4
    reference = _exp_weights(mu, points, beta)
    errors = []
    for k in ks:
        smoothed = _exp_weights(regularize(mu, int(k), cfg), points, beta)
        errors.append(float(np.mean(np.abs(smoothed - reference)) * volume))
        log.debug("regularization k=%d error=%g", k, errors[-1])
    return errors


def restriction_errors(
    mu: Measure,
    beta: float,
    ks: Sequence[float],
    cfg: QuadratureConfig | None = None,
    radius: float = 1.0,
) -> list[float]:
    """∫_{B(radius)} |e^{βΛ_{μ|B(k)}} − e^{βΛ}| for each restriction radius k."""
    cfg = cfg or QuadratureConfig()
    points = sample_ball(np.zeros(3), radius, cfg.mc_samples, cfg)
    volume = UNIT_BALL_VOLUME * radius ** 4
    reference = _exp_weights(mu, points, beta)
    return [
        float(np.mean(np.abs(_exp_weights(restrict(mu, k), points, beta) - reference)) * volume)
        for k in ks
    ]
