import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.construct.bump import xi0_integral
from heisenqc.contact.tabulated import BoxGrid
from heisenqc.errors import BoundDivergesError, ConfigError, DomainError
from heisenqc.flow.composed import ComposedMap, Dilation, translation
from heisenqc.group.point import Point, gauge, inv, mul
from heisenqc.iterate.budget import BudgetConfig, dilatation_budget, exact_endpoint, size_threshold
from heisenqc.iterate.comparability import comparability_grid, comparability_report, weak_jacobian_sequence
from heisenqc.iterate.scheme import IterationConfig, iterate, normalize_to_q0, sweep
from heisenqc.potential.logpot import LogPotential
from heisenqc.potential.measure import Measure


def test_size_threshold():
    # 1.5·E₁(1)
    assert size_threshold(BudgetConfig()) == pytest.approx(0.32907590159328, rel=1e-10)
    assert size_threshold(BudgetConfig(K=8.0)) < size_threshold(BudgetConfig())


def test_budget_without_perturbation():
    report = dilatation_budget(BudgetConfig(epsilon_prime=0.0))
    assert report.phi_end == 0.0
    assert report.bound == 1.0
    assert exact_endpoint(BudgetConfig()) == 0.0


def test_budget_matches_closed_form():
    cfg = BudgetConfig(epsilon_prime=0.5 * size_threshold(BudgetConfig()))
    report = dilatation_budget(cfg)
    assert report.phi_end == pytest.approx(exact_endpoint(cfg), rel=1e-6)
    assert report.bound > 1.0
    assert set(report.to_dict()) == {"epsilon", "epsilon_prime", "phi_end", "bound"}


def test_budget_diverges_at_threshold():
    eps = size_threshold(BudgetConfig())
    with pytest.raises(BoundDivergesError):
        dilatation_budget(BudgetConfig(epsilon_prime=eps))
    with pytest.raises(BoundDivergesError):
        exact_endpoint(BudgetConfig(epsilon_prime=2.0 * eps))


def test_budget_config_validation():
    with pytest.raises(ConfigError):
        BudgetConfig(epsilon_prime=-1.0)
    with pytest.raises(ConfigError):
        BudgetConfig(K=0.5)


def test_comparability_grid_excludes_atoms(cfg):
    mu = Measure.dirac((0.0, 0.0, 0.0))
    points, meta = comparability_grid(mu, cfg, n=200, exclusion=1.0)
    assert np.all(gauge(points) >= 1.0)
    assert meta["n"] == points.shape[0] < 200
    assert meta["seed"] == cfg.rng_seed


def test_comparability_of_dilation_against_zero_potential(cfg):
    points, meta = comparability_grid(Measure.empty(), cfg, n=50)
    report = comparability_report(Dilation(2.0), LogPotential(Measure.empty()), points, cfg, meta)
    assert report.spread == pytest.approx(1.0)
    assert_allclose(report.ratios, 1.0)
    assert report.normalization == pytest.approx(1.0 / 16.0)
    assert len(report.rows()) == 50
    assert len(report.rows()[0]) == 6


def test_comparability_normalized_by_geometric_mean(cfg):
    mu = Measure.dirac()
    points, meta = comparability_grid(mu, cfg, n=100)
    report = comparability_report(ComposedMap.identity(), LogPotential(mu), points, cfg, meta)
    assert np.mean(np.log(report.ratios)) == pytest.approx(0.0, abs=1e-12)
    # J = 1 and e^{-2Λ} = ‖p‖², so the spread is the squared gauge spread
    norms = gauge(report.points)
    assert report.spread == pytest.approx((norms.max() / norms.min()) ** 2, rel=1e-9)


def test_weak_jacobian_sequence(cfg):
    maps = [Dilation(1.5), Dilation(1.2), Dilation(1.05), ComposedMap.identity()]
    report = weak_jacobian_sequence(maps, cfg=cfg, n=2048)
    assert report.integrals[-1] == pytest.approx(xi0_integral(), rel=5e-2)
    assert report.integrals[0] == pytest.approx(1.5 ** 4 * report.integrals[-1])
    assert report.residuals[-1] == 0.0
    assert report.monotone


def test_iteration_config_validation():
    with pytest.raises(ConfigError):
        IterationConfig(m=0)
    with pytest.raises(ConfigError):
        IterationConfig(m=1, p0=Point(2.0, 0.0, 0.0))
    with pytest.raises(ConfigError):
        IterationConfig(m=1, g=ComposedMap.of(translation([1.0, 0.0, 0.0])))
    with pytest.raises(ConfigError):
        IterationConfig(m=1, g=ComposedMap.of(Dilation(2.0)))


def test_iterate_without_density(cfg):
    f, report = iterate(IterationConfig(m=2, grid_points=64, quadrature=cfg))
    assert f.is_identity
    assert report.completed_steps == 2
    assert report.radii == [1.0, 1.0]
    assert report.c_m == 0.0
    assert report.spread == 1.0
    assert report.to_dict()["exp_minus_c_m"] == 1.0


def test_iterate_with_atom(cfg):
    config = IterationConfig(
        m=2,
        psi=Measure.dirac((0.3, 0.1, 0.0), 0.02),
        flow_steps=4,
        table=BoxGrid.around_ball(2.0, 9),
        jacobian_table=BoxGrid.around_ball(2.0, 5),
        kernel_nodes=8,
        grid_points=32,
        quadrature=cfg,
    )
    f, report = iterate(config)
    assert report.completed_steps == 2
    assert len(f) == 4
    # each step renormalizes p₀ back onto the unit sphere
    assert_allclose(report.normalization, 1.0, rtol=1e-12)
    assert report.c_m == pytest.approx(-4.0 * np.sum(np.log(report.radii)))
    assert all(K >= 1.0 - 1e-9 for K in report.K_steps)
    assert np.isfinite(report.spread) and report.spread >= 1.0
    assert report.psi_mass == pytest.approx(0.02)


def test_sweep_over_m(cfg):
    config = IterationConfig(
        m=1,
        psi=Measure.dirac((0.5, 0.0, 0.0), 0.05),
        flow_steps=4,
        table=BoxGrid.around_ball(2.0, 9),
        jacobian_table=BoxGrid.around_ball(2.0, 5),
        kernel_nodes=8,
        grid_points=64,
        quadrature=cfg,
    )
    maps, report = sweep(config, (4, 2, 4))
    assert report.ms == [2, 4]
    assert len(maps) == 2
    assert all(np.isfinite(s) and s >= 1.0 for s in report.spreads)
    # refining the time step does not spread the ratios further
    assert report.spreads[1] <= 1.1 * report.spreads[0]
    for step_report in report.reports:
        assert_allclose(step_report.normalization, 1.0, atol=1e-6)
        assert 0.5 < np.exp(-step_report.c_m) < 2.0
    assert all(np.isfinite(r) for r in report.weak.residuals)
    assert report.weak.residuals[-1] == 0.0
    assert report.weak.monotone
    assert set(report.to_dict()) == {
        "ms", "spreads", "spread_trend", "exp_minus_c_m", "max_normalization_error", "weak_jacobian",
    }
    assert report.to_dict()["max_normalization_error"] < 1e-6


def test_sweep_needs_values():
    with pytest.raises(ConfigError):
        sweep(IterationConfig(m=1), ())


def test_normalize_to_q0():
    g = ComposedMap.of(Dilation(2.0), translation([1.0, 0.0, 0.0]))
    reduction = normalize_to_q0(g)
    assert reduction.rho == pytest.approx(0.5, rel=1e-10)
    assert_allclose(reduction.h.apply(np.zeros(3)), 0.0, atol=1e-12)
    assert float(gauge(reduction.h.apply(np.asarray(reduction.p0)))) == pytest.approx(1.0, rel=1e-10)
    # with f_h = id the unnormalized map is p ↦ a⁻¹ ⋆ p
    p = np.array([0.2, -0.1, 0.3])
    f = reduction.unnormalize(ComposedMap.identity())
    assert_allclose(f.apply(p), mul(inv(np.asarray(reduction.a)), p), atol=1e-12)


def test_normalize_to_q0_rejects_degenerate_direction():
    with pytest.raises(DomainError):
        normalize_to_q0(ComposedMap.identity(), max_doublings=0)
