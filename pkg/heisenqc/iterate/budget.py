"""
Predicted dilatation budget of the iteration.

With G(r) = A₁·exp(A₂K^{2/3}e^{2r/3}) the size threshold is
ε = ∫₀^∞ dr/G(r) = (3/(2A₁))·E₁(A₂K^{2/3}). For ε' < ε the problem
Φ' = ε'·G(Φ), Φ(0) = 0 has a solution on [0, 1] and e^{Φ(1)} bounds the
dilatation of the limit map.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import exp1

from heisenqc.errors import BoundDivergesError, ConfigError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BudgetConfig:
    epsilon_prime: float = 0.0
    K: float = 1.0
    A1: float = 1.0
    A2: float = 1.0
    steps: int = 1000

    def __post_init__(self):
        if self.epsilon_prime < 0:
            raise ConfigError(f"epsilon_prime must be non-negative, got {self.epsilon_prime}")
        if self.K < 1:
            raise ConfigError(f"K must be at least 1, got {self.K}")
        if self.A1 <= 0 or self.A2 <= 0:
            raise ConfigError("A1 and A2 must be positive")
        if int(self.steps) < 1:
            raise ConfigError(f"steps must be positive, got {self.steps}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BudgetReport:
    epsilon: float
    epsilon_prime: float
    phi_end: float
    bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def growth_function(r, cfg: BudgetConfig):
    return cfg.A1 * np.exp(cfg.A2 * cfg.K ** (2.0 / 3.0) * np.exp(2.0 * np.asarray(r, dtype=float) / 3.0))


def size_threshold(cfg: BudgetConfig) -> float:
    """ε = (3/(2A₁))·E₁(A₂K^{2/3})."""
    return float(1.5 / cfg.A1 * exp1(cfg.A2 * cfg.K ** (2.0 / 3.0)))


def exact_endpoint(cfg: BudgetConfig) -> float:
    """Φ(1) from ∫₀^Φ dr/G(r) = ε', solved with brentq."""
    eps = size_threshold(cfg)
    if cfg.epsilon_prime >= eps:
        raise BoundDivergesError(f"epsilon_prime={cfg.epsilon_prime:g} is not below epsilon={eps:g}")
    if cfg.epsilon_prime == 0:
        return 0.0
    a = cfg.A2 * cfg.K ** (2.0 / 3.0)
    target = exp1(a) - cfg.epsilon_prime * cfg.A1 / 1.5
    hi = 1.0
    while exp1(a * np.exp(2.0 * hi / 3.0)) > target:
        hi *= 2.0
    return float(brentq(lambda phi: exp1(a * np.exp(2.0 * phi / 3.0)) - target, 0.0, hi, xtol=1e-14))


def dilatation_budget(cfg: BudgetConfig) -> BudgetReport:
    """RK4 solution of Φ' = ε'·G(Φ) on [0, 1]."""
    eps = size_threshold(cfg)
    if cfg.epsilon_prime >= eps:
        raise BoundDivergesError(f"epsilon_prime={cfg.epsilon_prime:g} is not below epsilon={eps:g}")

    def rhs(phi):
        return cfg.epsilon_prime * growth_function(phi, cfg)

    h = 1.0 / cfg.steps
    phi = 0.0
    with np.errstate(over="raise"):
        try:
            for _ in range(cfg.steps):
                k1 = rhs(phi)
                k2 = rhs(phi + 0.5 * h * k1)
                k3 = rhs(phi + 0.5 * h * k2)
                k4 = rhs(phi + h * k3)
                phi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except FloatingPointError as e:
            raise BoundDivergesError("Budget ODE overflowed before time 1; refine steps") from e
    log.debug("budget: epsilon=%g epsilon'=%g Phi(1)=%g", eps, cfg.epsilon_prime, phi)
    return BudgetReport(epsilon=eps, epsilon_prime=cfg.epsilon_prime, phi_end=float(phi), bound=float(np.exp(phi)))
