"""
Invariant suite behind the `verify` command.

Responsibilities:
- One check function per invariant, each returning a CheckResult.
- Grouping of checks by subsystem so that --filter can select them.
- run_suite: run the selected groups and collect results in a fixed order.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from heisenqc.construct.bump import kernel_scale
from heisenqc.construct.kernel import LogKernel, lambda_comparability
from heisenqc.construct.potential import ConstructedPotential, zeta
from heisenqc.contact.field import ContactField, divergence_crosscheck
from heisenqc.contact.potentials import from_name
from heisenqc.contact.strain import IDENTITY_TOLERANCE, strain
from heisenqc.errors import ConfigError
from heisenqc.flow.composed import ComposedMap
from heisenqc.flow.dilatation import analytic_dilatation
from heisenqc.flow.integrator import FlowMap, jacobian_determinant, jacobian_variational
from heisenqc.flow.jacobian import jacobian_volume
from heisenqc.group.derivatives import bracket_residual
from heisenqc.group.point import dilate, dist, gauge, inv, mul
from heisenqc.group.quadrature import (
    UNIT_BALL_VOLUME,
    QuadratureConfig,
    ball_volume,
    box_integrate,
    polar_integrate,
    sample_ball,
)
from heisenqc.metric.curves import length_d
from heisenqc.metric.david_semmes import WeightField, david_semmes, doubling_quotients, sample_pairs
from heisenqc.metric.distance import CurveOptConfig, cc_distance, weighted_distance
from heisenqc.metric.suite import DOUBLING_RADII
from heisenqc.potential.logpot import LogPotential, eval_potential_many
from heisenqc.potential.measure import Measure, is_admissible, regularize

log = logging.getLogger(__name__)

GROUP_TOLERANCE = 1e-10

# radial-stretch flow shared by the construct and metric checks
STRETCH_STEPS = 32
STRETCH_KERNEL_NODES = 64
ZETA_POINTS = 64
# ceilings for quantities that are only required to stay bounded
ZETA_CEILING = 10.0
RATIO_SPREAD_CEILING = 100.0
DOUBLING_CEILING = 512.0


@dataclass(frozen=True)
class VerifyConfig:
    group_cases: int = 100_000
    bracket_points: int = 1000
    strain_resolution: int = 20
    flow_points: int = 20
    jacobian_points: int = 20
    lambda_pairs: int = 200
    metric_pairs: int = 4
    ratio_pairs: int = 200
    doubling_centers: int = 8

    def __post_init__(self):
        for name, value in asdict(self).items():
            if int(value) < 1:
                raise ConfigError(f"verify.{name} must be a positive integer, got {value}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    passed: bool
    value: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": dict(self.detail),
        }


def _check(name: str, group: str, value: float, tolerance: float, **detail) -> CheckResult:
    value = float(value)
    passed = bool(np.isfinite(value) and value <= tolerance)
    level = logging.DEBUG if passed else logging.WARNING
    log.log(level, "check %s: value=%.3g tolerance=%.3g", name, value, tolerance)
    return CheckResult(name, group, passed, value, float(tolerance), detail)


def _random_points(rng: np.random.Generator, n: int, scale: float = 2.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=(n, 3))


# ---- group ----

def check_group_axioms(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    rng = cfg.rng(100)
    n = vcfg.group_cases
    p, q, u = (_random_points(rng, n) for _ in range(3))
    r = rng.uniform(0.1, 10.0, size=n)

    left = mul(mul(p, q), u)
    right = mul(p, mul(q, u))
    assoc = np.max(np.abs(left - right) / (1.0 + np.abs(left)))
    inverse = np.max(np.abs(mul(p, inv(p))) + np.abs(mul(inv(p), p)))

    norms_pq, norms_p, norms_q = gauge(mul(p, q)), gauge(p), gauge(q)
    triangle = np.max((norms_pq - norms_p - norms_q) / (norms_p + norms_q))

    d_pq = dist(p, q)
    invariance = np.max(np.abs(dist(mul(u, p), mul(u, q)) - d_pq) / (1.0 + d_pq))
    homogeneity = np.max(np.abs(dist(dilate(r, p), dilate(r, q)) - r * d_pq) / (r * d_pq))

    return [
        _check("associativity", "group", assoc, GROUP_TOLERANCE, cases=n),
        _check("inverse", "group", inverse, GROUP_TOLERANCE, cases=n),
        _check("gauge_triangle", "group", max(triangle, 0.0), GROUP_TOLERANCE, cases=n),
        _check("left_invariance", "group", invariance, GROUP_TOLERANCE, cases=n),
        _check("homogeneity", "group", homogeneity, GROUP_TOLERANCE, cases=n),
    ]


def check_bracket(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    points = _random_points(cfg.rng(101), vcfg.bracket_points, scale=1.0)
    polynomials = {
        "xy": lambda p: p[:, 0] * p[:, 1],
        "x2t": lambda p: p[:, 0] ** 2 * p[:, 2],
        "y3+xt": lambda p: p[:, 1] ** 3 + p[:, 0] * p[:, 2],
    }
    worst = {name: float(np.max(bracket_residual(F, points, cfg))) for name, F in polynomials.items()}
    return [_check("bracket", "group", max(worst.values()), 1e-6, per_function=worst, points=points.shape[0])]


# ---- quadrature ----

def check_ball_volume(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    # 1-D reduction: |B(1)| = 2π ∫₀¹ 2ρ·sqrt(1 − ρ⁴) dρ over the planar radius ρ
    oracle, _ = quad(lambda rho: 2.0 * np.pi * 2.0 * rho * np.sqrt(max(1.0 - rho ** 4, 0.0)), 0.0, 1.0)
    estimate = ball_volume(np.zeros(3), 1.0, cfg)
    return [
        _check("ball_volume_oracle", "quadrature", abs(oracle - UNIT_BALL_VOLUME) / UNIT_BALL_VOLUME, 1e-8, oracle=oracle),
        _check(
            "ball_volume", "quadrature", abs(estimate - UNIT_BALL_VOLUME) / UNIT_BALL_VOLUME, 5e-3,
            estimate=estimate, exact=UNIT_BALL_VOLUME,
        ),
    ]


def check_polar_integration(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    box = np.array([2.5, 2.5, 6.0])
    # (integrand, radial cutoff, Cartesian reference)
    cases = {
        "exp(-|p|^4)": (lambda p: np.exp(-gauge(p) ** 4), 2.5, None),
        "x^2 exp(-|p|^4)": (lambda p: p[:, 0] ** 2 * np.exp(-gauge(p) ** 4), 2.5, None),
        # ∫ 4|B1| r³/(1+r⁸) dr = |B1|·π/2; the box would truncate the tail
        "1/(1+|p|^8)": (lambda p: 1.0 / (1.0 + gauge(p) ** 8), None, UNIT_BALL_VOLUME * np.pi / 2.0),
    }
    results = []
    for name, (f, r_max, reference) in cases.items():
        polar = polar_integrate(f, cfg, r_max=r_max)
        cartesian = box_integrate(f, box) if reference is None else reference
        results.append(
            _check(f"polar_vs_cartesian[{name}]", "quadrature", abs(polar - cartesian) / abs(cartesian), 1e-2,
                   polar=polar, cartesian=cartesian)
        )
    return results


# ---- potential ----

def check_potential(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    points = sample_ball(np.zeros(3), 2.0, 512, cfg)
    values, _ = eval_potential_many(LogPotential(Measure.dirac()), points, cfg)
    dirac = np.max(np.abs(values + np.log(gauge(points))))

    u = np.array([0.3, -0.2, 0.5])
    mu = Measure.from_atoms([((0.5, 0.0, 0.0), 0.7), ((-0.2, 0.4, 0.1), -0.3)])
    base, _ = eval_potential_many(LogPotential(mu), points, cfg)
    moved, _ = eval_potential_many(LogPotential(mu.left_translate(u)), mul(u, points), cfg)
    invariance = np.max(np.abs(moved - base))

    admissible = is_admissible(mu)
    return [
        _check("dirac_potential", "potential", dirac, 1e-12),
        _check("translation_covariance", "potential", invariance, 1e-10),
        _check("admissibility", "potential", 0.0 if admissible.admissible else 1.0, 0.0, **admissible.to_dict()),
    ]


# ---- contact ----

def check_strain_identity(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    grid_cfg = QuadratureConfig(cfg.rng_seed, cfg.mc_samples, vcfg.strain_resolution, cfg.fd_step)
    cases = {
        "x2": (from_name("x2", cfg=cfg), 0.0),
        "translation": (from_name("translation", {"a": 0.3, "b": -0.2, "c": 1.0}, cfg=cfg), 0.0),
        "log-gauge": (from_name("log-gauge", cfg=cfg), 0.5),
    }
    results = []
    for name, (phi, inner) in cases.items():
        v = ContactField(phi)
        report = strain(v, radius=2.0, inner_radius=inner, cfg=grid_cfg)
        results.append(
            _check(f"strain_identity[{name}]", "contact", report.residual_max, IDENTITY_TOLERANCE,
                   c=report.sup_estimate, points=int(report.points.shape[0]))
        )
        crosscheck = divergence_crosscheck(v, report.points[:200])
        results.append(_check(f"divergence[{name}]", "contact", float(np.max(crosscheck)), 1e-5))
    return results


# ---- flow ----

def _base_points(cfg: QuadratureConfig, n: int, inner: float = 0.3) -> np.ndarray:
    points = sample_ball(np.zeros(3), 1.0, 4 * n, cfg)
    return points[gauge(points) > inner][:n]


def check_flows(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    points = _base_points(cfg, vcfg.flow_points)
    s = 0.5

    unit = FlowMap(ContactField(from_name("constant", {"c": 1.0}, cfg=cfg)), s, steps=64)
    shifted = points + np.array([0.0, 0.0, s])
    constant_flow = np.max(np.abs(unit.apply(points) - shifted))

    a, b, c = 0.3, -0.2, 1.0
    translation = FlowMap(ContactField(from_name("translation", {"a": a, "b": b, "c": c}, cfg=cfg)), s, steps=64)
    expected = mul(np.array([s * a, s * b, s * c]), points)
    translation_error = np.max(np.abs(translation.apply(points) - expected))

    stretch = FlowMap(ContactField(from_name("radial-stretch", cfg=cfg)), s, steps=128)
    round_trip = np.max(np.abs(stretch.inverse().apply(stretch.apply(points)) - points))

    return [
        _check("constant_flow", "flow", constant_flow, 1e-10),
        _check("translation_flow", "flow", translation_error, 1e-6),
        _check("time_reversal", "flow", round_trip, 10.0 * stretch.step ** 2, step=stretch.step),
    ]


def check_jacobian_triple(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    s = 0.5
    results = []
    for name in ("radial-stretch", "t"):
        v = ContactField(from_name(name, cfg=cfg))
        F = ComposedMap.of(FlowMap(v, s, steps=128))
        worst = 0.0
        for p in _base_points(cfg, vcfg.jacobian_points, inner=0.5):
            det_route = jacobian_determinant(v, p, s)
            divergence_route = jacobian_variational(v, p, s)
            volume_route = jacobian_volume(F, p, cfg=cfg).value
            routes = np.array([det_route, divergence_route, volume_route])
            worst = max(worst, float(routes.max() / routes.min() - 1.0))
        results.append(_check(f"jacobian_triple[{name}]", "flow", worst, 0.03, points=vcfg.jacobian_points))
    return results


def check_dilatation_bound(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    v = ContactField(from_name("radial-stretch", cfg=cfg))
    c_hat = strain(v, radius=2.0, inner_radius=0.05, cfg=cfg).sup_estimate
    points = _base_points(cfg, vcfg.flow_points)
    results = []
    for s in (0.25, 0.5, 1.0):
        H = float(np.max(analytic_dilatation(FlowMap(v, s, steps=128), points)))
        results.append(
            _check(f"dilatation_bound[s={s:g}]", "flow", H / np.exp(c_hat * s), 1.05, H=H, c=c_hat)
        )
    return results


# ---- construct ----

def check_construction(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    kernel = LogKernel.for_map(ComposedMap.identity(), cfg)
    P, Q = sample_pairs(vcfg.lambda_pairs, cfg)
    ratios = lambda_comparability(kernel, P, Q)
    identity_spread = float(ratios.max() / ratios.min() - 1.0)
    identity_scale = float(np.max(np.abs(ratios / kernel_scale() - 1.0)))

    stretch = ComposedMap.of(FlowMap(ContactField(from_name("radial-stretch", cfg=cfg)), 0.5, steps=STRETCH_STEPS))
    stretch_ratios = lambda_comparability(LogKernel.for_map(stretch, cfg, n_nodes=STRETCH_KERNEL_NODES), P, Q)
    stretch_spread = float(stretch_ratios.max() / stretch_ratios.min())

    psi = Measure.dirac((0.5, 0.0, 0.0), 0.1)
    phi = ConstructedPotential(ComposedMap.identity(), psi, cfg)
    v0 = ContactField(phi)(np.zeros((1, 3)))[0]

    mollified = regularize(psi, 4, cfg)
    smooth = ConstructedPotential(ComposedMap.identity(), mollified, cfg)
    discrepancy = np.abs(zeta(smooth, sample_ball(np.zeros(3), 2.0, ZETA_POINTS, cfg)))
    return [
        _check("lambda_identity_spread", "construct", identity_spread, 0.02, pairs=vcfg.lambda_pairs),
        _check("lambda_identity_scale", "construct", identity_scale, 1e-6, c0=kernel_scale()),
        _check(
            "lambda_radial_stretch_spread", "construct", stretch_spread, 10.0,
            pairs=vcfg.lambda_pairs, min=float(stretch_ratios.min()), max=float(stretch_ratios.max()),
        ),
        _check("origin_field", "construct", float(np.linalg.norm(v0)), 1e-6),
        _check(
            "zeta_bounded", "construct", float(discrepancy.max()), ZETA_CEILING,
            points=ZETA_POINTS, psi_mass=float(np.sum(np.abs(mollified.nodes()[1]))),
        ),
    ]


# ---- metric ----

def check_metric(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    opt = CurveOptConfig(waypoint_ladder=(4, 8), restarts=1, seed=cfg.rng_seed)
    horizontal = cc_distance(np.zeros(3), np.array([1.5, 0.0, 0.0]), opt).value

    P, Q = sample_pairs(vcfg.metric_pairs, cfg)
    doubling = 0.0
    for p, q in zip(P, Q):
        base = cc_distance(p, q, opt).value
        doubled = weighted_distance(p, q, WeightField.constant(16.0), opt).value
        doubling = max(doubling, abs(doubled - 2.0 * base) / base)

    vertical = lambda s: np.stack([np.zeros_like(s), np.zeros_like(s), s], axis=-1)
    m_values = [4, 16, 64, 256]
    lengths = np.array(length_d(vertical, m_values))
    slope = np.polyfit(np.log(m_values), np.log(lengths), 1)[0]
    return [
        _check("horizontal_segment", "metric", abs(horizontal - 1.5) / 1.5, 1e-4),
        _check("constant_weight_scaling", "metric", doubling, 1e-12, pairs=vcfg.metric_pairs),
        _check("vertical_length_growth", "metric", abs(slope - 0.5) / 0.5, 0.05, slope=float(slope)),
    ]


def check_jacobian_weight(vcfg: VerifyConfig, cfg: QuadratureConfig) -> list[CheckResult]:
    """d_ω against ρ∘F and ν-doubling for ω = J_F, F the radial-stretch flow."""
    F = ComposedMap.of(FlowMap(ContactField(from_name("radial-stretch", cfg=cfg)), 0.5, steps=STRETCH_STEPS))
    omega = WeightField.from_jacobian(F)
    opt = CurveOptConfig(waypoint_ladder=(4, 8), restarts=1, seed=cfg.rng_seed)

    P, Q = sample_pairs(vcfg.ratio_pairs, cfg)
    FP, FQ = F.apply(P), F.apply(Q)
    ratios = np.array([
        david_semmes(p, q, omega, cfg) / cc_distance(fp, fq, opt).value
        for p, q, fp, fq in zip(P, Q, FP, FQ)
    ])
    quotients = doubling_quotients(omega, P[:vcfg.doubling_centers], DOUBLING_RADII, cfg)
    return [
        _check(
            "david_semmes_over_image_distance", "metric", float(ratios.max() / ratios.min()), RATIO_SPREAD_CEILING,
            pairs=vcfg.ratio_pairs, min=float(ratios.min()), max=float(ratios.max()),
        ),
        _check(
            "jacobian_weight_doubling", "metric", float(quotients.max()), DOUBLING_CEILING,
            radii=list(DOUBLING_RADII), centers=int(quotients.shape[0]), min=float(quotients.min()),
        ),
    ]


SUITES: dict[str, list[Callable[[VerifyConfig, QuadratureConfig], list[CheckResult]]]] = {
    "group": [check_group_axioms, check_bracket],
    "quadrature": [check_ball_volume, check_polar_integration],
    "potential": [check_potential],
    "contact": [check_strain_identity],
    "flow": [check_flows, check_jacobian_triple, check_dilatation_bound],
    "construct": [check_construction],
    "metric": [check_metric, check_jacobian_weight],
}


def run_suite(
    vcfg: VerifyConfig | None = None,
    cfg: QuadratureConfig | None = None,
    only: str | None = None,
) -> list[CheckResult]:
    """Run every group, or only the named one."""
    vcfg = vcfg or VerifyConfig()
    cfg = cfg or QuadratureConfig()
    if only is not None and only not in SUITES:
        raise ConfigError(f"Unknown filter '{only}'. Known: {sorted(SUITES)}")
    selected = [only] if only is not None else list(SUITES)
    results = []
    for group in selected:
        for check in SUITES[group]:
            log.info("running %s", check.__name__)
            results.extend(check(vcfg, cfg))
    return results
