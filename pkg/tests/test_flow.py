import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.contact.field import ContactField
from heisenqc.contact.potentials import constant, from_name, translation_generator
from heisenqc.errors import DomainError, FlowEscapeError
from heisenqc.flow.composed import ComposedMap, Dilation, LeftTranslation, as_composed, translation
from heisenqc.flow.dilatation import (
    analytic_dilatation,
    composition_dilatation,
    contact_residual,
    dilatation,
    qs_checks,
)
from heisenqc.flow.integrator import (
    FlowMap,
    HorizontalDifferential,
    flow_with_differential,
    integrate,
    integration_error,
    jacobian_determinant,
    jacobian_variational,
    steps_for,
    trajectory_rows,
)
from heisenqc.flow.jacobian import jacobian_volume
from heisenqc.group.point import Point, dilate, mul

P = np.array([0.4, -0.3, 0.2])


def vertical_field():
    return ContactField(from_name("t"))


def test_constant_flow_is_vertical_translation():
    trajectory = integrate(ContactField(constant(1.0)), P, 1.5, step=0.1)
    assert trajectory.shape == (16, 3)
    assert_allclose(trajectory[-1], P + [0.0, 0.0, 1.5], atol=1e-12)
    assert integration_error(ContactField(constant(1.0)), P, 1.5, step=0.1) < 1e-14


def test_vertical_potential_flows_by_dilation():
    s = 1.0
    end = integrate(vertical_field(), P, s)[-1]
    assert_allclose(end, dilate(np.exp(s / 2.0), P), rtol=1e-9)
    assert jacobian_variational(vertical_field(), P, s) == pytest.approx(np.exp(2.0 * s), rel=1e-12)
    assert jacobian_determinant(vertical_field(), P, s) == pytest.approx(np.exp(2.0 * s), rel=1e-9)


def test_translation_generator_flow():
    a, b, c, s = 0.5, -1.0, 2.0, 0.7
    v = ContactField(translation_generator(a, b, c))
    end = integrate(v, P, s, step=0.1)[-1]
    assert_allclose(end, mul([s * a, s * b, s * c], P), atol=1e-12)


def test_flow_with_differential():
    end, A = flow_with_differential(vertical_field(), P, 0.5)
    assert isinstance(end, Point)
    assert isinstance(A, HorizontalDifferential)
    assert_allclose(A.as_matrix(), np.exp(0.25) * np.eye(2), rtol=1e-9, atol=1e-12)
    assert A.dilatation == pytest.approx(1.0)
    assert A.jacobian == pytest.approx(np.exp(1.0), rel=1e-9)


def test_trajectory_rows():
    rows = trajectory_rows(vertical_field(), [1.0, 0.0, 0.0], 0.5)
    assert len(rows) == 257
    assert all(len(row) == 8 for row in rows)
    assert rows[0] == [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]
    assert rows[-1][0] == pytest.approx(0.5)


def test_steps_for():
    assert steps_for(1.0, None) == 256
    assert steps_for(1.0, 0.1) == 10
    assert steps_for(-1.0, 0.3) == 4
    with pytest.raises(DomainError):
        steps_for(1.0, 0.0)


def test_flow_map_inverse():
    F = FlowMap(ContactField(from_name("x2")), 0.3, steps=64)
    points = np.array([P, [1.0, 1.0, -0.5]])
    assert_allclose(F.inverse().apply(F.apply(points)), points, atol=1e-9)
    assert F.inverse_apply(F.apply(points)) == pytest.approx(points, abs=1e-9)
    assert F.step == pytest.approx(0.3 / 64)


def test_flow_map_log_jacobian():
    F = FlowMap(vertical_field(), 0.8, steps=32)
    assert_allclose(F.log_jacobian(np.array([P, 2 * P])), 1.6, rtol=1e-12)
    assert F.describe() == {"kind": "flow", "field": "t", "time": 0.8, "steps": 32}


def test_escape_is_reported():
    F = FlowMap(ContactField(constant(1.0)), 5.0, steps=50, radius_bound=1.5)
    with pytest.raises(FlowEscapeError):
        F.apply([0.0, 0.0, 1.0])


def test_composed_word_order():
    F = ComposedMap.of(Dilation(2.0), translation([1.0, 0.0, 0.0]))
    # δ₂ first, then the translation
    assert_allclose(F.apply(P), mul([1.0, 0.0, 0.0], dilate(2.0, P)))
    G = ComposedMap.of(LeftTranslation(Point(0.0, 1.0, 0.0)))
    assert_allclose(F.compose(G).apply(P), F.apply(G.apply(P)))
    assert_allclose(F.inverse().apply(F.apply(P)), P, atol=1e-14)
    assert F.inverse_apply(F.apply(P)) == pytest.approx(P)


def test_composed_constant_jacobian():
    F = ComposedMap.of(Dilation(2.0), translation([1.0, 0.0, 0.0]))
    assert F.has_constant_jacobian
    assert F.constant_log_jacobian() == pytest.approx(4.0 * np.log(2.0))
    assert_allclose(F.jacobian(np.zeros((3, 3))), 16.0)
    assert_allclose(F.horizontal_differential(P), [2.0 * np.eye(2)])


def test_composed_chain_rule_with_flow():
    s = 0.4
    F = ComposedMap.of(Dilation(2.0), FlowMap(vertical_field(), s, steps=32))
    assert not F.has_constant_jacobian
    assert_allclose(F.log_jacobian(P), 4.0 * np.log(2.0) + 2.0 * s, rtol=1e-12)
    assert_allclose(F.horizontal_differential(P), [2.0 * np.exp(s / 2.0) * np.eye(2)], rtol=1e-9)
    with pytest.raises(DomainError):
        F.constant_log_jacobian()
    assert [letter["kind"] for letter in F.describe()] == ["dilation", "flow"]


def test_identity_and_wrapping():
    identity = ComposedMap.identity()
    assert identity.is_identity
    assert len(identity) == 0
    assert_allclose(identity.apply(P), P)
    assert as_composed(identity) is identity
    assert len(as_composed(Dilation(3.0))) == 1
    with pytest.raises(DomainError):
        Dilation(-1.0)


def test_volume_jacobian_of_dilation(cfg):
    result = jacobian_volume(Dilation(2.0), np.zeros(3), cfg=cfg)
    assert result.value == pytest.approx(16.0, rel=3e-2)
    assert result.converged
    assert result.to_dict()["radii"] == [0.1, 0.05, 0.025, 0.0125]
    with pytest.raises(DomainError):
        jacobian_volume(Dilation(2.0), np.zeros(3), radii=(0.1, -0.1), cfg=cfg)


def test_volume_jacobian_of_flow(cfg):
    F = FlowMap(vertical_field(), 0.5, steps=32)
    result = jacobian_volume(F, P, radii=(0.05, 0.025), cfg=cfg)
    assert result.value == pytest.approx(np.exp(1.0), rel=5e-2)


def test_metric_dilatation_of_conformal_maps(cfg):
    points = np.array([P, [1.0, 0.0, 0.0]])
    assert dilatation(ComposedMap.identity(), points, cfg=cfg).K == pytest.approx(1.0, abs=1e-9)
    assert dilatation(Dilation(3.0), points, cfg=cfg).K == pytest.approx(1.0, abs=1e-9)
    flow = FlowMap(vertical_field(), 0.5, steps=32)
    report = dilatation(flow, points, radii=(0.05, 0.025), cfg=cfg)
    assert report.K == pytest.approx(1.0, abs=1e-6)
    assert report.ratios.shape == (2, 2)


def test_analytic_dilatation():
    assert analytic_dilatation(Dilation(2.0), P) == pytest.approx(1.0)
    F = FlowMap(ContactField(from_name("x2")), 0.5, steps=32)
    assert np.all(analytic_dilatation(F, np.array([P, 2 * P])) > 1.0)


def test_composition_dilatation_is_submultiplicative():
    f1 = FlowMap(ContactField(from_name("x2")), 0.3, steps=32)
    f2 = FlowMap(ContactField(from_name("radial-stretch")), 0.2, steps=32)
    points = np.array([P, [1.0, 0.5, -0.2], [-0.6, 0.8, 0.4]])
    result = composition_dilatation(f1, f2, points)
    assert result["max_quotient"] <= 1.0 + 1e-9
    assert result["sup_composed"] <= result["sup_product"] + 1e-9


def test_contact_residual(cfg):
    F = FlowMap(ContactField(from_name("x2")), 0.3, steps=64)
    assert contact_residual(F, P, cfg) < 1e-6
    assert contact_residual(ComposedMap.identity(), P, cfg) < 1e-9


def test_qs_checks_of_identity(cfg):
    report = qs_checks(ComposedMap.identity(), cfg=cfg)
    assert report.ball_comparability == pytest.approx(1.0, abs=1e-9)
    assert report.growth_constant == pytest.approx(1.0, abs=1e-9)
    assert report.dilatation_bound == pytest.approx(1.0)
    assert all(v == pytest.approx(1.0) for v in report.reverse_holder.values())
    assert report.change_of_variables_residual < 5e-2
    assert set(report.to_dict()) == {
        "ball_comparability", "growth_constant", "reverse_holder",
        "change_of_variables_residual", "dilatation_bound",
    }
