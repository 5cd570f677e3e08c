import numpy as np
import pytest
from numpy.testing import assert_allclose

from heisenqc.construct.bump import PLATEAU, SUPPORT, kernel_scale, xi0, xi0_integral, xi0_profile
from heisenqc.construct.kernel import (
    KernelNodes,
    LogKernel,
    eta,
    lambda_comparability,
    lambda_g,
    log_derivative_quotients,
    tilde_phi,
)
from heisenqc.construct.potential import ConstructedPotential, phi1, phi2_and_assemble, tabulate_constructed, zeta
from heisenqc.contact.field import ContactField
from heisenqc.contact.potentials import from_name
from heisenqc.contact.tabulated import BoxGrid
from heisenqc.errors import PoleError
from heisenqc.flow.composed import ComposedMap, Dilation
from heisenqc.flow.integrator import FlowMap
from heisenqc.group.point import dist, gauge
from heisenqc.group.quadrature import UNIT_BALL_VOLUME, sample_ball
from heisenqc.metric.david_semmes import sample_pairs
from heisenqc.potential.measure import Measure, regularize

P = np.array([[0.4, -0.3, 0.2], [1.0, 0.5, -0.5]])
Q = np.array([[-0.2, 0.1, 0.6], [0.0, 0.0, 1.0]])


def test_cutoff_profile():
    assert xi0_profile(0.0) == 1.0
    assert xi0_profile(PLATEAU) == 1.0
    assert xi0_profile(SUPPORT) == 0.0
    assert 0.0 < xi0_profile(0.375) < 1.0
    assert_allclose(xi0(np.array([[0.1, 0.0, 0.0], [0.0, 0.0, 0.5]])), [1.0, 0.0])


def test_cutoff_integral_bounds():
    assert UNIT_BALL_VOLUME * PLATEAU ** 4 < xi0_integral() < UNIT_BALL_VOLUME * SUPPORT ** 4
    assert kernel_scale() == pytest.approx(xi0_integral() ** 0.25)


def test_kernel_nodes(cfg):
    nodes = KernelNodes.build(64, cfg)
    assert len(nodes) <= 64
    assert nodes.weights.sum() == pytest.approx(xi0_integral())
    assert np.all(gauge(nodes.nodes) < SUPPORT)


def test_identity_lambda_is_scaled_distance(cfg):
    kernel = LogKernel.for_map(ComposedMap.identity(), cfg, n_nodes=32)
    assert_allclose(lambda_comparability(kernel, P, Q), kernel_scale(), rtol=1e-12)
    expected = kernel_scale() * float(dist(P[0], Q[0]))
    assert lambda_g(ComposedMap.identity(), P[0], Q[0], cfg) == pytest.approx(expected, rel=1e-12)


def test_dilation_lambda(cfg):
    kernel = LogKernel.for_map(Dilation(2.0), cfg, n_nodes=32)
    assert_allclose(lambda_comparability(kernel, P, Q), kernel_scale(), rtol=1e-12)


def test_flow_lambda_uses_node_quadrature(cfg):
    # the flow of φ = t is a dilation, but its Jacobian goes through the nodes
    g = ComposedMap.of(FlowMap(ContactField(from_name("t")), 0.5, steps=16))
    kernel = LogKernel.for_map(g, cfg, n_nodes=16)
    assert not g.has_constant_jacobian
    assert_allclose(lambda_comparability(kernel, P, Q), kernel_scale(), rtol=1e-8)


def test_log_lambda_grid_shape(cfg):
    kernel = LogKernel.for_map(ComposedMap.identity(), cfg, n_nodes=16)
    assert kernel.log_lambda(P, np.concatenate([Q, P])).shape == (2, 4)
    assert kernel.log_lambda(P[0], P[0])[0, 0] == -np.inf


def test_eta_and_poles(cfg):
    g = ComposedMap.of(Dilation(2.0))
    kernel = LogKernel.for_map(g, cfg, n_nodes=16)
    q = np.array([[1.0, 0.0, 0.0]])
    assert_allclose(kernel.poles(q), [[0.5, 0.0, 0.0]])
    with pytest.raises(PoleError):
        kernel.eta([[0.5, 0.0, 0.0]], q)
    value = eta(g, P[0], q[0], cfg)
    assert value == pytest.approx(-float(np.log(kernel.lam(P[0], [0.5, 0.0, 0.0])[0, 0])))


def test_tilde_phi_vanishes_at_pole(cfg):
    kernel = LogKernel.for_map(ComposedMap.identity(), cfg, n_nodes=16)
    assert kernel.tilde_phi([[0.5, 0.0, 0.0]], [[0.5, 0.0, 0.0]])[0, 0] == 0.0
    # the vertical factor (a⁻¹ ⋆ p)₃ vanishes on the horizontal line through a
    assert tilde_phi(ComposedMap.identity(), [0.8, 0.0, 0.0], [0.5, 0.0, 0.0], cfg) == pytest.approx(0.0, abs=1e-15)
    assert tilde_phi(ComposedMap.identity(), [0.5, 0.0, 0.3], [0.5, 0.0, 0.0], cfg) != 0.0


def test_log_derivative_quotients_bounded(cfg):
    kernel = LogKernel.for_map(ComposedMap.identity(), cfg, n_nodes=16)
    quotients = log_derivative_quotients(kernel, P, Q)
    assert np.all(np.isfinite(quotients))
    assert np.all(quotients < 10.0)


@pytest.fixture
def constructed(cfg):
    psi = Measure.dirac((0.3, 0.1, 0.0), 0.1)
    return phi2_and_assemble(ComposedMap.identity(), psi, cfg, n_nodes=16)


def test_constructed_field_vanishes_at_origin(constructed):
    v = ContactField(constructed)
    assert_allclose(v(np.zeros((1, 3))), 0.0, atol=1e-12)
    assert constructed(np.zeros((1, 3)))[0] == 0.0
    description = constructed.describe()
    assert description["poles"] == 1
    assert description["kernel_nodes"] == len(constructed.kernel.nodes)
    assert len(description["c"]) == 3


def test_constructed_potential_splits(constructed):
    points = sample_ball(np.zeros(3), 1.0, 16, constructed.cfg)
    assert_allclose(constructed(points), constructed.phi1(points) - constructed.phi2(points))


def test_empty_density_gives_zero_potential(cfg):
    phi = ConstructedPotential(ComposedMap.identity(), Measure.empty(), cfg, n_nodes=16)
    assert phi.c == (0.0, 0.0, 0.0)
    assert_allclose(phi(P), 0.0)


def test_zeta_is_finite(constructed):
    points = np.array([[1.0, 1.0, 0.0], [-0.5, 0.5, 0.5]])
    assert np.all(np.isfinite(zeta(constructed, points)))


def test_tabulated_constructed_field_vanishes_at_origin(constructed):
    table = tabulate_constructed(constructed, BoxGrid.around_ball(1.0, 9))
    assert table(np.zeros((1, 3)))[0] == pytest.approx(0.0, abs=1e-12)
    assert_allclose(table.horizontal_gradient(np.zeros((1, 3)))[0, :2], 0.0, atol=1e-12)


def test_phi1_matches_assembled_potential(cfg):
    psi = Measure.dirac((0.3, 0.1, 0.0), 0.1)
    g = ComposedMap.of(Dilation(2.0))
    assert isinstance(phi2_and_assemble(g, psi, cfg), ConstructedPotential)
    assert_allclose(phi1(g, psi, P, cfg), phi2_and_assemble(g, psi, cfg).phi1(P))


def test_radial_stretch_lambda_is_comparable(cfg):
    g = ComposedMap.of(FlowMap(ContactField(from_name("radial-stretch", cfg=cfg)), 0.5, steps=16))
    kernel = LogKernel.for_map(g, cfg, n_nodes=32)
    pairs_p, pairs_q = sample_pairs(50, cfg)
    ratios = lambda_comparability(kernel, pairs_p, pairs_q)
    assert np.all(np.isfinite(ratios))
    assert ratios.min() > 0.0
    assert ratios.max() / ratios.min() < 10.0


def test_zeta_is_bounded_for_mollified_atom(cfg):
    psi = regularize(Measure.dirac((0.5, 0.0, 0.0), 0.1), 4, cfg)
    phi = ConstructedPotential(ComposedMap.identity(), psi, cfg)
    discrepancy = zeta(phi, sample_ball(np.zeros(3), 2.0, 32, cfg))
    assert np.all(np.isfinite(discrepancy))
    assert np.max(np.abs(discrepancy)) < 10.0
