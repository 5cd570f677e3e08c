import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.errors import ConfigError, DomainError
from heisenqc.flow.composed import ComposedMap, Dilation
from heisenqc.group.point import dilate, dist, mul
from heisenqc.group.quadrature import UNIT_BALL_VOLUME
from heisenqc.metric.curves import (
    chain_bound,
    closing_loop,
    horizontal_lift,
    length_d,
    lift_heights,
    omega_length,
    omega_partition_length,
    signed_area,
)
from heisenqc.metric.david_semmes import WeightField, david_semmes, doubling_quotients, sample_pairs
from heisenqc.metric.distance import CurveOptConfig, cc_distance, weighted_distance
from heisenqc.metric.suite import comparability_suite

FAST = CurveOptConfig(waypoint_ladder=(4, 8, 16), restarts=1)
UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]


def test_lift_of_counterclockwise_square():
    heights = lift_heights(np.array(UNIT_SQUARE))
    assert heights[-1] == pytest.approx(-4.0)
    assert signed_area(np.array(UNIT_SQUARE[:-1])) == pytest.approx(1.0)


def test_admissible_curve():
    curve = horizontal_lift((0.0, 0.0, 0.5), UNIT_SQUARE)
    assert curve.horizontal_length == pytest.approx(4.0)
    assert curve.horizontality_residual() < 1e-12
    assert_allclose(curve.end.to_list(), [0.0, 0.0, -3.5])
    assert_allclose(curve.at([0.0, 1.0]), [[0.0, 0.0, 0.5], [0.0, 0.0, -3.5]], atol=1e-12)
    with pytest.raises(DomainError):
        horizontal_lift((1.0, 0.0, 0.0), UNIT_SQUARE)


@pytest.mark.parametrize("defect", [0.3, -0.2])
def test_closing_loop_raises_height_by_defect(defect):
    loop, length = closing_loop((0.5, -0.2), defect)
    assert_allclose(loop[0], [0.5, -0.2])
    assert_allclose(loop[-1], [0.5, -0.2])
    assert lift_heights(loop)[-1] == pytest.approx(defect, abs=1e-12)
    assert length == pytest.approx(np.sum(np.linalg.norm(np.diff(loop, axis=0), axis=1)), rel=1e-9)


def test_length_d_of_vertical_segment():
    def gamma(s):
        return np.stack([np.zeros_like(s), np.zeros_like(s), s], axis=-1)

    assert_allclose(length_d(gamma, [1, 4, 16]), [1.0, 2.0, 4.0])


def test_omega_length_of_constant_weight():
    curve = horizontal_lift((0.0, 0.0, 0.0), UNIT_SQUARE)
    assert omega_length(curve, WeightField.constant(1.0)) == pytest.approx(4.0)
    assert omega_length(curve, WeightField.constant(16.0)) == pytest.approx(8.0)


def test_cc_distance_horizontal():
    result = cc_distance((0.0, 0.0, 0.0), (1.5, 0.0, 0.0), FAST)
    assert result.value == pytest.approx(1.5, rel=1e-3)
    assert result.curve.horizontality_residual() < 1e-9


def test_cc_distance_vertical():
    # the shortest loop enclosing area 1/4 is a circle of length √π
    result = cc_distance((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), CurveOptConfig(waypoint_ladder=(8, 16, 32), restarts=1))
    assert result.value == pytest.approx(np.sqrt(np.pi), rel=2e-2)
    assert result.value >= np.sqrt(np.pi) * (1 - 1e-6)


def test_cc_distance_invariance():
    p = np.array([0.1, -0.2, 0.3])
    q = np.array([0.6, 0.4, -0.2])
    a = np.array([1.0, 2.0, -1.0])
    base = cc_distance(p, q, FAST).value
    assert cc_distance(mul(a, p), mul(a, q), FAST).value == pytest.approx(base, rel=1e-6)
    assert cc_distance(dilate(3.0, p), dilate(3.0, q), FAST).value == pytest.approx(3.0 * base, rel=1e-6)
    assert cc_distance(p, p, FAST).value == 0.0


def test_weighted_distance_constant_weight():
    p, q = (0.0, 0.0, 0.0), (1.0, 0.5, 0.2)
    base = cc_distance(p, q, FAST).value
    assert weighted_distance(p, q, WeightField.constant(16.0), FAST).value == pytest.approx(2.0 * base)


def test_curve_opt_config_validation():
    with pytest.raises(ConfigError):
        CurveOptConfig(waypoint_ladder=())
    with pytest.raises(ConfigError):
        CurveOptConfig(restarts=0)


def test_weight_field():
    assert WeightField.from_jacobian(Dilation(2.0)).constant_value == pytest.approx(16.0)
    with pytest.raises(DomainError):
        WeightField.constant(-1.0)
    negative = WeightField.analytic(lambda p: -np.ones(p.shape[0]), "negative")
    with pytest.raises(DomainError):
        negative(np.zeros(3))


def test_doubling_of_constant_weight(cfg):
    quotients = doubling_quotients(WeightField.constant(3.0), np.zeros((2, 3)), [0.5, 1.0], cfg)
    assert_allclose(quotients, 16.0)


def test_david_semmes_scales_with_weight(cfg):
    p, q = (0.0, 0.0, 0.0), (0.5, 0.0, 0.1)
    one = david_semmes(p, q, WeightField.constant(1.0), cfg)
    assert one > 0
    assert david_semmes(p, q, WeightField.constant(16.0), cfg) == pytest.approx(2.0 * one)
    assert david_semmes(p, p, WeightField.constant(1.0), cfg) == 0.0


def test_sample_pairs_are_separated(cfg):
    ps, qs = sample_pairs(10, cfg, min_separation=0.1)
    assert ps.shape == qs.shape == (10, 3)
    assert np.all(dist(ps, qs) >= 0.1)


def test_comparability_suite_of_identity(cfg):
    report = comparability_suite(
        ComposedMap.identity(), WeightField.constant(1.0), cfg=cfg, opt=FAST, n_pairs=3, doubling_radii=(0.5,)
    )
    assert_allclose(report.rho_f_over_rho_w, 1.0, rtol=1e-9)
    assert report.bilipschitz_constant == pytest.approx(1.0, rel=1e-9)
    assert_allclose(report.doubling, 16.0)
    assert len(report.rows()) == 3
    assert report.to_dict()["n_pairs"] == 3


def test_omega_partition_length_of_vertical_segment(cfg):
    def gamma(s):
        return np.stack([np.zeros_like(s), np.zeros_like(s), s], axis=-1)

    # every piece is a dilated translate of the same pair, so the sums grow like √m
    one, four = omega_partition_length(gamma, WeightField.constant(1.0), [1, 4], cfg)
    assert four == pytest.approx(2.0 * one, rel=1e-9)


def test_chain_bound_of_horizontal_segment(cfg):
    curve = horizontal_lift((0.0, 0.0, 0.0), [(0.0, 0.0), (1.0, 0.0)])
    ratio = chain_bound(curve, WeightField.constant(1.0), cfg)
    # ν of the union lies between one ball and two balls of radius 1
    assert UNIT_BALL_VOLUME ** 0.25 <= ratio <= (2.0 * UNIT_BALL_VOLUME) ** 0.25
