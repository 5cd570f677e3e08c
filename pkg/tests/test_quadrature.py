import numpy as np
import pytest

from heisenqc.errors import ConfigError, DomainError, IntegrabilityError
from heisenqc.group.point import dist, gauge
from heisenqc.group.quadrature import (
    UNIT_BALL_VOLUME,
    QuadratureConfig,
    ball_volume,
    box_integrate,
    polar_integrate,
    sample_ball,
    sphere_grid,
    sphere_samples,
    unit_ball_samples,
)


def test_config_validation():
    with pytest.raises(ConfigError):
        QuadratureConfig(mc_samples=0)
    with pytest.raises(ConfigError):
        QuadratureConfig(fd_step=0.0)
    assert QuadratureConfig().with_samples(10).mc_samples == 10


def test_streams_are_reproducible_and_independent():
    cfg = QuadratureConfig(rng_seed=3)
    a = cfg.rng(1).random(5)
    assert np.array_equal(a, QuadratureConfig(rng_seed=3).rng(1).random(5))
    assert not np.array_equal(a, cfg.rng(2).random(5))


def test_unit_ball_samples(cfg):
    pts = unit_ball_samples(500, cfg)
    assert pts.shape == (500, 3)
    assert np.all(gauge(pts) < 1.0)
    assert unit_ball_samples(500, cfg) is pts


def test_sample_ball_stays_inside(cfg):
    center = np.array([1.0, -0.5, 2.0])
    pts = sample_ball(center, 0.3, 200, cfg)
    assert np.all(dist(pts, center) < 0.3 + 1e-12)
    with pytest.raises(DomainError):
        sample_ball(center, 0.0, 10, cfg)


def test_sphere_points_have_unit_gauge(cfg):
    assert np.allclose(gauge(sphere_samples(256, cfg)), 1.0)
    assert np.allclose(gauge(sphere_grid(8, 5)), 1.0)


def test_ball_volume(cfg):
    assert ball_volume(np.zeros(3), 1.0, cfg) == pytest.approx(UNIT_BALL_VOLUME, rel=3e-2)


def test_ball_volume_scales_with_fourth_power(cfg):
    one = ball_volume(np.zeros(3), 1.0, cfg)
    assert ball_volume(np.zeros(3), 2.0, cfg) == pytest.approx(16.0 * one, rel=1e-9)


def test_ball_volume_off_center(cfg):
    assert ball_volume([1.0, 1.0, 0.0], 1.0, cfg) == pytest.approx(UNIT_BALL_VOLUME, rel=5e-2)


def test_box_integrate_polynomial():
    # midpoint rule is exact for affine integrands
    value = box_integrate(lambda p: 1.0 + p[:, 0], [1.0, 2.0, 3.0], n=8)
    assert value == pytest.approx(48.0)


def test_polar_integrate_indicator(cfg):
    value = polar_integrate(lambda p: (gauge(p) < 1.0).astype(float), cfg, r_max=1.0, directions=1024)
    assert value == pytest.approx(UNIT_BALL_VOLUME, rel=3e-2)


def test_polar_integrate_decaying_tail(cfg):
    value = polar_integrate(lambda p: 1.0 / (1.0 + gauge(p) ** 8), cfg, directions=1024)
    assert value == pytest.approx(UNIT_BALL_VOLUME * np.pi / 2.0, rel=3e-2)


def test_polar_integrate_non_integrable(cfg):
    with pytest.raises(IntegrabilityError) as info:
        polar_integrate(lambda p: np.ones(p.shape[0]), cfg, directions=64, max_doublings=6)
    assert len(info.value.partial_sums) == 7
