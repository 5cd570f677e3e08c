import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.errors import DomainError
from heisenqc.group.derivatives import Direction, bracket_residual, hderiv, hgradient
from heisenqc.group.point import (
    IDENTITY,
    Point,
    as_points,
    dilate,
    dist,
    frame,
    frame_to_cartesian,
    gauge,
    inv,
    mul,
)


def test_product_formula():
    p = np.array([1.0, 2.0, 3.0])
    q = np.array([-0.5, 4.0, 1.0])
    # t = 3 + 1 + 2(x2*y1 - x1*y2) = 4 + 2(-1 - 4)
    assert_allclose(mul(p, q), [0.5, 6.0, -6.0])


def test_group_axioms(rng):
    p, q, u = (rng.uniform(-3, 3, size=(500, 3)) for _ in range(3))
    assert_allclose(mul(mul(p, q), u), mul(p, mul(q, u)), atol=1e-12)
    assert_allclose(mul(p, inv(p)), 0.0, atol=1e-12)
    assert_allclose(mul(IDENTITY, p), p)


def test_point_dataclass():
    p = Point(1.0, 2.0, 3.0)
    assert (p * p.inverse()).to_list() == [0.0, 0.0, 0.0]
    assert Point.from_array(np.asarray(p)) == p
    with pytest.raises(DomainError):
        Point(np.nan, 0.0, 0.0)


def test_as_points_rejects_wrong_shape():
    with pytest.raises(DomainError):
        as_points([1.0, 2.0])


def test_gauge_values():
    assert gauge([1.0, 0.0, 0.0]) == pytest.approx(1.0)
    assert gauge([0.0, 0.0, 1.0]) == pytest.approx(1.0)
    assert gauge([3.0, 4.0, 0.0]) == pytest.approx(5.0)
    # no overflow for large but representable inputs
    assert np.isfinite(gauge([1e150, 0.0, 0.0]))


def test_gauge_triangle_and_homogeneity(rng):
    p, q = rng.uniform(-2, 2, size=(2, 1000, 3))
    assert np.all(gauge(mul(p, q)) <= gauge(p) + gauge(q) + 1e-12)
    r = rng.uniform(0.1, 10.0, size=1000)
    assert_allclose(gauge(dilate(r, p)), r * gauge(p), rtol=1e-12)


def test_dilation_is_automorphism(rng):
    p, q = rng.uniform(-2, 2, size=(2, 200, 3))
    assert_allclose(dilate(2.5, mul(p, q)), mul(dilate(2.5, p), dilate(2.5, q)), rtol=1e-12, atol=1e-12)


def test_dilate_rejects_non_positive():
    with pytest.raises(DomainError):
        dilate(0.0, [1.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        dilate(-1.0, [1.0, 0.0, 0.0])


def test_distance_left_invariant(rng):
    p, q, u = rng.uniform(-2, 2, size=(3, 300, 3))
    assert_allclose(dist(mul(u, p), mul(u, q)), dist(p, q), rtol=1e-10)
    assert_allclose(dist(p, q), dist(q, p), rtol=1e-12)


def test_frame_is_horizontal_for_x_and_y():
    X, Y, T = frame(Point(0.3, -0.7, 2.0))
    assert X.vertical_defect() == pytest.approx(0.0)
    assert Y.vertical_defect() == pytest.approx(0.0)
    assert T.vertical_defect() == pytest.approx(1.0)
    assert X.horizontal_norm == pytest.approx(1.0)


def test_frame_to_cartesian():
    p = np.array([[0.5, 0.25, 0.0]])
    # X + Y at p = ∂x + ∂y + (2y - 2x)∂t
    assert_allclose(frame_to_cartesian(p, [[1.0, 1.0, 0.0]]), [[1.0, 1.0, -0.5]])


def test_horizontal_derivatives_of_t():
    p = np.array([0.5, 0.3, 0.1])
    t = lambda q: q[..., 2]
    assert hderiv(t, p, Direction.X) == pytest.approx(0.6, abs=1e-8)
    assert hderiv(t, p, "Y") == pytest.approx(-1.0, abs=1e-8)
    assert hderiv(t, p, Direction.T) == pytest.approx(1.0, abs=1e-8)


def test_hgradient_shape(cfg):
    grad = hgradient(lambda q: q[..., 0] ** 2, np.zeros((4, 3)) + [1.0, 0.0, 0.0], cfg)
    assert grad.shape == (4, 3)
    assert_allclose(grad[:, 0], 2.0, atol=1e-6)


def test_bracket_relation(cfg, rng):
    points = rng.uniform(-1, 1, size=(50, 3))
    for F in (lambda p: p[:, 0] * p[:, 1], lambda p: p[:, 0] ** 2 * p[:, 2]):
        assert np.max(bracket_residual(F, points, cfg)) < 1e-5
