import pytest

from heisenqc.group.quadrature import QuadratureConfig


@pytest.fixture
def cfg():
    return QuadratureConfig(rng_seed=0, mc_samples=8192, grid_resolution=12)


@pytest.fixture
def rng():
    return QuadratureConfig(rng_seed=7).rng(0)
