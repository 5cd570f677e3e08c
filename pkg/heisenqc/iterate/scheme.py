"""
The iterative composition scheme.

f_{m,0} = id; for j = 1..m the potential of G = g∘f⁻¹_{m,j−1} and ψ
generates a contact field whose time-1/m flow h is appended, and the word
is renormalized by δ_{1/r} with r = ‖h(f_{m,j−1}(p₀))‖. The normalization
constants accumulate into c_m = −4 Σ log r.

Responsibilities:
- IterationConfig validation (normalized g, p₀ on the unit sphere).
- iterate: the loop above, with per-step dilatation estimates.
- sweep: the scheme over several m with weak Jacobian convergence.
- normalize_to_q0: reduction of a map with g(0) ≠ 0 to the normalized class.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from heisenqc.construct.kernel import DEFAULT_KERNEL_NODES
from heisenqc.construct.potential import phi2_and_assemble, tabulate_constructed
from heisenqc.contact.field import field_from_potential
from heisenqc.contact.tabulated import BoxGrid, JacobianTable
from heisenqc.errors import ConfigError, DomainError, EvaluationError, FlowEscapeError, IterationAborted, QuadratureError
from heisenqc.flow.composed import ComposedMap, Dilation, LeftTranslation, as_composed
from heisenqc.flow.dilatation import analytic_dilatation
from heisenqc.flow.integrator import FlowMap
from heisenqc.group.point import Point, dilate, gauge, mul
from heisenqc.group.quadrature import QuadratureConfig, unit_ball_samples
from heisenqc.iterate.comparability import (
    ComparabilityReport,
    WeakJacobianReport,
    comparability_grid,
    comparability_report,
    weak_jacobian_sequence,
)
from heisenqc.potential.logpot import LogPotential
from heisenqc.potential.measure import Measure

log = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-6
# sample points for the per-step dilatation estimate
STEP_SAMPLES = 64


@dataclass(frozen=True, eq=False)
class IterationConfig:
    m: int
    g: ComposedMap = field(default_factory=ComposedMap.identity)
    psi: Measure = field(default_factory=Measure.empty)
    p0: Point = Point(1.0, 0.0, 0.0)
    flow_steps: int = 32
    table: BoxGrid = field(default_factory=lambda: BoxGrid.around_ball(4.0, 17))
    jacobian_table: BoxGrid = field(default_factory=lambda: BoxGrid.around_ball(8.0, 17))
    kernel_nodes: int = DEFAULT_KERNEL_NODES
    grid_points: int = 1000
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if int(self.m) < 1:
            raise ConfigError(f"m must be a positive integer, got {self.m}")
        if int(self.flow_steps) < 1:
            raise ConfigError(f"flow_steps must be positive, got {self.flow_steps}")
        object.__setattr__(self, "g", as_composed(self.g))
        p0 = np.asarray(self.p0, dtype=float)
        if abs(float(gauge(p0)) - 1.0) > NORMALIZATION_TOLERANCE:
            raise ConfigError(f"p0 must lie on the unit sphere, got norm {float(gauge(p0)):.6g}")
        if float(gauge(self.g.apply(np.zeros(3)))) > NORMALIZATION_TOLERANCE:
            raise ConfigError("g must fix the origin; use normalize_to_q0 first")
        if abs(float(gauge(self.g.apply(p0))) - 1.0) > 1e-3:
            raise ConfigError("g(p0) must lie on the unit sphere; use normalize_to_q0 first")

    @property
    def psi_mass(self) -> float:
        return float(np.sum(np.abs(self.psi.nodes()[1])))


@dataclass
class IterationReport:
    m: int
    K_steps: list[float] = field(default_factory=list)
    radii: list[float] = field(default_factory=list)
    normalization: list[float] = field(default_factory=list)
    c_m: float = 0.0
    psi_mass: float = 0.0
    comparability: ComparabilityReport | None = None

    @property
    def completed_steps(self) -> int:
        return len(self.radii)

    @property
    def spread(self) -> float:
        return 1.0 if self.comparability is None else self.comparability.spread

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "completed_steps": self.completed_steps,
            "K_steps": list(self.K_steps),
            "radii": list(self.radii),
            "normalization": list(self.normalization),
            "c_m": self.c_m,
            "exp_minus_c_m": float(np.exp(-self.c_m)),
            "psi_mass": self.psi_mass,
            "spread": self.spread,
            "grid_meta": {} if self.comparability is None else dict(self.comparability.grid_meta),
        }


def _step_map(G: ComposedMap, cfg: IterationConfig, m: int) -> FlowMap | None:
    """Time-1/m flow generated by the potential of (G, ψ); None for ψ = 0."""
    if cfg.psi.nodes()[1].size == 0:
        return None
    kernel_map = G if G.has_constant_jacobian else JacobianTable(G, cfg.jacobian_table, clamp=True)
    phi = phi2_and_assemble(kernel_map, cfg.psi, cfg.quadrature, n_nodes=cfg.kernel_nodes)
    field_ = field_from_potential(tabulate_constructed(phi, cfg.table))
    return FlowMap(field_, 1.0 / m, steps=cfg.flow_steps)


def iterate(cfg: IterationConfig) -> tuple[ComposedMap, IterationReport]:
    """Run the scheme; on escape, quadrature or evaluation failure raise IterationAborted with the partial report."""
    m = int(cfg.m)
    report = IterationReport(m=m, psi_mass=cfg.psi_mass)
    f = ComposedMap.identity()
    p0 = np.asarray(cfg.p0, dtype=float)
    samples = unit_ball_samples(STEP_SAMPLES, cfg.quadrature)

    try:
        for j in range(1, m + 1):
            G = cfg.g.compose(f.inverse())
            h = _step_map(G, cfg, m)
            if h is None:
                report.K_steps.append(1.0)
                report.radii.append(1.0)
                report.normalization.append(float(gauge(f.apply(p0))))
                continue
            report.K_steps.append(float(np.max(analytic_dilatation(h, samples))))
            stepped = f.then(h)
            r = float(gauge(stepped.apply(p0)))
            f = stepped.then(Dilation(1.0 / r))
            report.radii.append(r)
            report.c_m += -4.0 * np.log(r)
            report.normalization.append(float(gauge(f.apply(p0))))
            log.info("iteration step %d/%d: r=%.6g K=%.6g", j, m, r, report.K_steps[-1])

        points, meta = comparability_grid(cfg.psi, cfg.quadrature, n=cfg.grid_points)
        potential = LogPotential(cfg.psi, precomposition=cfg.g)
        report.comparability = comparability_report(f, potential, points, cfg.quadrature, meta)
    except (FlowEscapeError, QuadratureError, EvaluationError) as e:
        log.warning("iteration aborted after %d steps: %s", report.completed_steps, e)
        raise IterationAborted(f"Iteration aborted after {report.completed_steps} of {m} steps: {e}", report) from e
    return f, report


@dataclass(frozen=True, eq=False)
class SweepReport:
    """One iteration report per m, and the weak Jacobian residuals of the f_m against the largest m."""
    ms: list[int]
    reports: list[IterationReport]
    weak: WeakJacobianReport

    @property
    def spreads(self) -> list[float]:
        return [r.spread for r in self.reports]

    @property
    def spread_trend(self) -> float:
        """spread at the largest m over spread at the smallest."""
        return self.spreads[-1] / self.spreads[0]

    def to_dict(self) -> dict:
        return {
            "ms": list(self.ms),
            "spreads": self.spreads,
            "spread_trend": self.spread_trend,
            "exp_minus_c_m": [float(np.exp(-r.c_m)) for r in self.reports],
            "max_normalization_error": max(
                (abs(n - 1.0) for r in self.reports for n in r.normalization), default=0.0
            ),
            "weak_jacobian": self.weak.to_dict(),
        }


def sweep(cfg: IterationConfig, ms) -> tuple[list[ComposedMap], SweepReport]:
    """Run the scheme for every m in ms (increasing) with otherwise identical settings."""
    ms = sorted({int(m) for m in ms})
    if not ms:
        raise ConfigError("A sweep needs at least one value of m")
    maps, reports = [], []
    for m in ms:
        f, report = iterate(replace(cfg, m=m))
        maps.append(f)
        reports.append(report)
    weak = weak_jacobian_sequence(maps, cfg=cfg.quadrature)
    log.info("sweep over m=%s: spreads=%s", ms, [round(s, 6) for s in (r.spread for r in reports)])
    return maps, SweepReport(ms=ms, reports=reports, weak=weak)


@dataclass(frozen=True, eq=False)
class Reduction:
    """h = g ∘ L_a ∘ δ_ρ with a = g⁻¹(0), ρ = ‖q₀‖; h(0) = 0 and ‖h(p₀)‖ = 1."""
    h: ComposedMap
    p0: Point
    q0: Point
    a: Point

    @property
    def rho(self) -> float:
        return float(gauge(np.asarray(self.q0)))

    def unnormalize(self, f_h) -> ComposedMap:
        """f = δ_ρ ∘ f_h ∘ δ_{1/ρ} ∘ L_{a⁻¹}."""
        return ComposedMap(
            (LeftTranslation(self.a.inverse()), Dilation(1.0 / self.rho))
            + as_composed(f_h).word
            + (Dilation(self.rho),)
        )


def normalize_to_q0(g, direction=(1.0, 0.0, 0.0), max_doublings: int = 60) -> Reduction:
    """Find q₀ = δ_ρ(p₀) on the ray through direction with ‖g(g⁻¹(0) ⋆ q₀)‖ = 1."""
    g = as_composed(g)
    p0 = np.asarray(direction, dtype=float).reshape(3)
    p0 = dilate(1.0 / float(gauge(p0)), p0)
    a = g.inverse_apply(np.zeros(3))

    def excess(rho: float) -> float:
        return float(gauge(g.apply(mul(a, dilate(rho, p0))))) - 1.0

    lo, hi = 1.0, 1.0
    for _ in range(max_doublings):
        if excess(lo) < 0:
            break
        lo /= 2.0
    for _ in range(max_doublings):
        if excess(hi) > 0:
            break
        hi *= 2.0
    if not (excess(lo) < 0 < excess(hi)):
        raise DomainError("No radius along the ray maps onto the unit sphere")
    rho = float(brentq(excess, lo, hi, xtol=1e-14, rtol=1e-14))
    a_point = Point.from_array(a)
    h = ComposedMap((Dilation(rho), LeftTranslation(a_point)) + g.word)
    log.debug("normalize_to_q0: rho=%.12g a=%s", rho, a_point.to_list())
    return Reduction(h=h, p0=Point.from_array(p0), q0=Point.from_array(dilate(rho, p0)), a=a_point)
