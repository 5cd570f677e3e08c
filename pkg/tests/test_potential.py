import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.errors import DomainError
from heisenqc.group.point import dilate, dist, gauge, mul
from heisenqc.group.quadrature import QuadratureConfig, sample_ball
from heisenqc.potential.convergence import regularization_errors, restriction_errors
from heisenqc.potential.logpot import LogPotential, eval_potential, eval_potential_many, lipschitz_quotients
from heisenqc.potential.measure import (
    Measure,
    is_admissible,
    log_moment_shells,
    mollifier,
    regularize,
    restrict,
    total_variation,
)


@pytest.fixture
def mixed():
    return Measure.from_atoms([((0.5, 0.0, 0.0), 0.7), ((-0.2, 0.4, 0.1), -0.3)])


def test_dirac_potential_is_minus_log_gauge(cfg):
    points = sample_ball(np.zeros(3), 2.0, 256, cfg)
    values, at_atom = eval_potential_many(LogPotential(Measure.dirac()), points)
    assert_allclose(values, -np.log(gauge(points)), rtol=1e-12)
    assert not at_atom.any()


def test_value_at_atom():
    value = eval_potential(LogPotential(Measure.dirac()), np.zeros(3))
    assert value.at_atom
    assert value.value == np.inf
    assert value.exp(1.0) == np.inf
    assert value.exp(-1.0) == 0.0

    negative = eval_potential(LogPotential(Measure.dirac(mass=-2.0)), np.zeros(3))
    assert negative.value == -np.inf
    assert negative.exp(1.0) == 0.0


def test_finite_value_exp():
    value = eval_potential(LogPotential(Measure.dirac()), [2.0, 0.0, 0.0])
    assert not value.at_atom
    assert value.exp(1.0) == pytest.approx(0.5)
    assert float(value) == pytest.approx(-np.log(2.0))


def test_translation_covariance(mixed, cfg):
    points = sample_ball(np.zeros(3), 2.0, 256, cfg)
    u = np.array([0.3, -0.2, 0.5])
    base = LogPotential(mixed)(points)
    moved = LogPotential(mixed.left_translate(u))(mul(u, points))
    assert_allclose(moved, base, atol=1e-10)


def test_dilation_covariance(mixed, cfg):
    points = sample_ball(np.zeros(3), 2.0, 256, cfg)
    r = 3.0
    base = LogPotential(mixed)(points)
    scaled = LogPotential(mixed.dilate(r))(dilate(r, points))
    assert_allclose(scaled, base - mixed.signed_mass() * np.log(r), atol=1e-10)


def test_precomposition():
    class Shift:
        def apply(self, points):
            return points + np.array([1.0, 0.0, 0.0])

    potential = LogPotential(Measure.dirac(), precomposition=Shift())
    assert potential(np.array([[1.0, 0.0, 0.0]]))[0] == pytest.approx(-np.log(2.0))


def test_lipschitz_quotients_are_finite(mixed, cfg):
    p = sample_ball([2.0, 2.0, 0.0], 0.5, 64, cfg)
    q = sample_ball([2.0, 2.0, 0.0], 0.5, 64, QuadratureConfig(rng_seed=1))
    quotients = lipschitz_quotients(LogPotential(mixed), (p, q))
    assert np.all(np.isfinite(quotients))
    assert np.all(quotients >= 0)


def test_total_variation_and_mass(mixed):
    assert total_variation(mixed) == pytest.approx(1.0)
    assert mixed.signed_mass() == pytest.approx(0.4)
    assert total_variation(Measure.empty()) == 0.0


def test_admissibility_of_far_atoms():
    mu = Measure.from_atoms([((3.0, 0.0, 0.0), 1.0), ((0.1, 0.0, 0.0), 1.0)])
    shells = log_moment_shells(mu)
    # gauge 3 falls in the shell 2 ≤ ‖q‖ < 4
    assert shells == pytest.approx([0.0, np.log(3.0)])
    report = is_admissible(mu)
    assert report.admissible
    assert report.log_moment == pytest.approx(np.log(3.0))
    assert is_admissible(Measure.dirac()).log_moment == 0.0


def test_serialization(mixed):
    assert Measure.from_dict(mixed.to_dict()) == mixed


def test_restrict():
    mu = Measure.from_atoms([((3.0, 0.0, 0.0), 1.0), ((0.1, 0.0, 0.0), 2.0)])
    assert restrict(mu, 1.0).signed_mass() == pytest.approx(2.0)
    assert restrict(mu, 4.0) == mu
    with pytest.raises(DomainError):
        restrict(mu, 0.0)


def test_mollifier_support():
    assert mollifier(np.array([[1.0, 0.0, 0.0]]))[0] == 0.0
    assert mollifier(np.zeros((1, 3)))[0] > 0


def test_regularize_preserves_mass():
    mu = Measure.dirac((0.5, 0.0, 0.0), 1.0)
    smoothed = regularize(mu, 4, QuadratureConfig(grid_resolution=16))
    assert smoothed.density is not None
    assert smoothed.signed_mass() == pytest.approx(1.0, rel=5e-2)
    # the smoothed measure lives in B(atom, 1/4)
    nodes, weights = smoothed.nodes()
    assert np.all(dist(nodes[weights != 0], [0.5, 0.0, 0.0]) < 0.25 + 1e-9)


def test_regularize_rejects_bad_index():
    with pytest.raises(DomainError):
        regularize(Measure.dirac(), 0)
    assert regularize(Measure.empty(), 2) == Measure.empty()


def test_regularization_errors_decrease():
    cfg = QuadratureConfig(mc_samples=2048, grid_resolution=10)
    errors = regularization_errors(Measure.dirac(), 1.0, (1, 4), cfg)
    assert errors[1] < errors[0]


def test_restriction_errors():
    cfg = QuadratureConfig(mc_samples=1024)
    assert restriction_errors(Measure.dirac(), 1.0, (1.0, 2.0), cfg) == [0.0, 0.0]
    far = Measure.dirac((3.0, 0.0, 0.0))
    errors = restriction_errors(far, 1.0, (1.0, 4.0), cfg)
    assert errors[0] > 0
    assert errors[1] == 0.0
