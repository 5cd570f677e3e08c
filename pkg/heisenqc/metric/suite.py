"""
Pairwise comparison of ρ(F(p), F(q)), ρ_ω(p, q) and d_ω(p, q) over a batch
of point pairs, with ν-doubling quotients and the (pseudo/quasi)metric
checks that go with them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from heisenqc.flow.composed import as_composed
from heisenqc.group.point import as_points, dist
from heisenqc.group.quadrature import QuadratureConfig
from heisenqc.metric.david_semmes import (
    WeightField,
    david_semmes,
    doubling_quotients,
    quasimetric_constant,
    sample_pairs,
    sample_triples,
)
from heisenqc.metric.distance import CurveOptConfig, cc_distance, weighted_distance

log = logging.getLogger(__name__)

DOUBLING_RADII = (0.125, 0.25, 0.5, 1.0)
DOUBLING_CENTERS = 8

CSV_HEADER = [
    "px", "py", "pt", "qx", "qy", "qt",
    "rho_f", "rho_w", "d_w",
    "d_w_over_rho_f", "d_w_over_rho_w", "rho_f_over_rho_w",
]


def _spread(values: np.ndarray) -> float:
    values = values[np.isfinite(values) & (values > 0)]
    return float(values.max() / values.min()) if values.size else float("nan")


def _stats(values: np.ndarray) -> dict:
    finite = values[np.isfinite(values)]
    if not finite.size:
        return {"min": float("nan"), "max": float("nan"), "mean": float("nan"), "spread": float("nan")}
    return {
        "min": float(finite.min()),
        "max": float(finite.max()),
        "mean": float(finite.mean()),
        "spread": _spread(finite),
    }


@dataclass(frozen=True, eq=False)
class PseudometricReport:
    symmetry_defect: float
    triangle_ratio: float
    quasimetric_constant: float
    n_triples: int

    def to_dict(self) -> dict:
        return {
            "symmetry_defect": self.symmetry_defect,
            "triangle_ratio": self.triangle_ratio,
            "quasimetric_constant": self.quasimetric_constant,
            "n_triples": self.n_triples,
        }


@dataclass(frozen=True, eq=False)
class MetricSuiteReport:
    p: np.ndarray
    q: np.ndarray
    rho_f: np.ndarray
    rho_w: np.ndarray
    d_w: np.ndarray
    doubling: np.ndarray
    cc_over_gauge: np.ndarray
    unconverged: int
    omega: str
    pseudometric: PseudometricReport | None = None
    doubling_radii: tuple = DOUBLING_RADII
    extra: dict = field(default_factory=dict)

    @property
    def d_w_over_rho_f(self) -> np.ndarray:
        return self.d_w / self.rho_f

    @property
    def d_w_over_rho_w(self) -> np.ndarray:
        return self.d_w / self.rho_w

    @property
    def rho_f_over_rho_w(self) -> np.ndarray:
        return self.rho_f / self.rho_w

    @property
    def bilipschitz_constant(self) -> float:
        """Empirical L with ρ_ω/L ≤ ρ(F(p), F(q)) ≤ L·ρ_ω on the batch."""
        r = self.rho_f_over_rho_w
        r = r[np.isfinite(r) & (r > 0)]
        return float(np.max(np.maximum(r, 1.0 / r))) if r.size else float("nan")

    def rows(self) -> list[list[float]]:
        columns = [
            self.p, self.q,
            self.rho_f[:, None], self.rho_w[:, None], self.d_w[:, None],
            self.d_w_over_rho_f[:, None], self.d_w_over_rho_w[:, None], self.rho_f_over_rho_w[:, None],
        ]
        return np.hstack(columns).tolist()

    def to_dict(self) -> dict:
        return {
            "n_pairs": int(self.p.shape[0]),
            "omega": self.omega,
            "unconverged": self.unconverged,
            "L": self.bilipschitz_constant,
            "d_w_over_rho_f": _stats(self.d_w_over_rho_f),
            "d_w_over_rho_w": _stats(self.d_w_over_rho_w),
            "rho_f_over_rho_w": _stats(self.rho_f_over_rho_w),
            "cc_over_gauge": _stats(self.cc_over_gauge),
            "doubling": {
                "radii": list(self.doubling_radii),
                "max": float(np.max(self.doubling)) if self.doubling.size else float("nan"),
                "min": float(np.min(self.doubling)) if self.doubling.size else float("nan"),
            },
            "pseudometric": None if self.pseudometric is None else self.pseudometric.to_dict(),
            **self.extra,
        }


def pseudometric_checks(
    omega: WeightField,
    triples,
    cfg: QuadratureConfig | None = None,
    opt: CurveOptConfig | None = None,
) -> PseudometricReport:
    """Symmetry and triangle inequality of ρ_ω, and the quasimetric constant of d_ω, on triples (p, u, q)."""
    symmetry = 0.0
    triangle = 0.0
    n = 0
    for p, u, q in triples:
        pq = weighted_distance(p, q, omega, opt).value
        qp = weighted_distance(q, p, omega, opt).value
        via = weighted_distance(p, u, omega, opt).value + weighted_distance(u, q, omega, opt).value
        if max(pq, qp) > 0:
            symmetry = max(symmetry, abs(pq - qp) / max(pq, qp))
        if via > 0:
            triangle = max(triangle, pq / via)
        n += 1
    return PseudometricReport(symmetry, triangle, quasimetric_constant(omega, triples, cfg), n)


def comparability_suite(
    F,
    omega: WeightField,
    pairs: tuple[np.ndarray, np.ndarray] | None = None,
    cfg: QuadratureConfig | None = None,
    opt: CurveOptConfig | None = None,
    n_pairs: int = 200,
    n_triples: int = 0,
    doubling_radii=DOUBLING_RADII,
) -> MetricSuiteReport:
    """Ratio statistics of d_ω, ρ_ω and ρ∘F over a pair batch."""
    cfg = cfg or QuadratureConfig()
    opt = opt or CurveOptConfig(seed=cfg.rng_seed)
    Fmap = as_composed(F)
    if pairs is None:
        pairs = sample_pairs(n_pairs, cfg)
    P = np.atleast_2d(as_points(pairs[0]))
    Q = np.atleast_2d(as_points(pairs[1]))
    FP, FQ = Fmap.apply(P), Fmap.apply(Q)

    rho_f = np.empty(P.shape[0])
    rho_w = np.empty(P.shape[0])
    d_w = np.empty(P.shape[0])
    unconverged = 0
    for i in range(P.shape[0]):
        image = cc_distance(FP[i], FQ[i], opt)
        weighted = weighted_distance(P[i], Q[i], omega, opt)
        rho_f[i] = image.value
        rho_w[i] = weighted.value
        d_w[i] = david_semmes(P[i], Q[i], omega, cfg)
        unconverged += int(not (image.converged and weighted.converged))
        log.debug("pair %d: rho_f=%.6g rho_w=%.6g d_w=%.6g", i, rho_f[i], rho_w[i], d_w[i])
    if unconverged:
        log.warning("comparability suite: %d of %d pairs flagged by the curve optimizer", unconverged, P.shape[0])

    centers = P[:DOUBLING_CENTERS]
    doubling = doubling_quotients(omega, centers, doubling_radii, cfg)
    pseudometric = None
    if n_triples > 0:
        pseudometric = pseudometric_checks(omega, sample_triples(n_triples, cfg), cfg, opt)

    return MetricSuiteReport(
        p=P,
        q=Q,
        rho_f=rho_f,
        rho_w=rho_w,
        d_w=d_w,
        doubling=doubling,
        cc_over_gauge=rho_f / dist(FP, FQ),
        unconverged=unconverged,
        omega=omega.provenance,
        pseudometric=pseudometric,
        doubling_radii=tuple(doubling_radii),
    )
