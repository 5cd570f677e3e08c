import pytest

from heisenqc.config import RunConfig, build_map, config_hash
from heisenqc.errors import ConfigError
from heisenqc.flow.composed import Dilation, LeftTranslation
from heisenqc.flow.integrator import FlowMap


def test_empty_config_is_defaults():
    config = RunConfig.from_dict({})
    assert config_hash(config) == config_hash(RunConfig())
    assert config.iteration.m == 2
    assert config.flow.potential == "radial-stretch"
    assert config.output.directory == "out"


def test_hash_is_stable_and_round_trips():
    config = RunConfig.from_dict({"seed": 3, "flow": {"potential": "t", "steps": 16}})
    digest = config_hash(config)
    assert len(digest) == 64
    assert config_hash(RunConfig.from_dict(config.to_dict())) == digest
    assert config_hash(config.with_overrides(seed=4)) != digest


def test_seed_reaches_quadrature():
    config = RunConfig.from_dict({"seed": 5})
    assert config.quadrature.rng_seed == 5
    assert config.with_overrides(seed=9).quadrature.rng_seed == 9
    assert config.with_overrides(out="elsewhere").output.directory == "elsewhere"


@pytest.mark.parametrize(
    "data",
    [
        {"unknown": 1},
        {"seed": -1},
        {"flow": {"steps": -1}},
        {"flow": {"start": [1.0, 0.0]}},
        {"metric": {"weight": "other"}},
        {"schema_version": 2},
    ],
)
def test_schema_errors(data):
    with pytest.raises(ConfigError, match="schema"):
        RunConfig.from_dict(data)


def test_semantic_errors():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"iteration": {"p0": [2.0, 0.0, 0.0]}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"metric": {"doubling_radii": [0.5, 0.25]}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"iteration": {"sweep": [4, 2]}})


def test_iteration_sweep_setting():
    assert RunConfig().iteration.sweep == ()
    config = RunConfig.from_dict({"iteration": {"sweep": [2, 4]}})
    assert config.iteration.sweep == (2, 4)
    assert RunConfig.from_dict(config.to_dict()).iteration.sweep == (2, 4)


def test_measure_settings_merge_over_defaults():
    config = RunConfig.from_dict({"construct": {"psi": {"atoms": [{"location": [0.2, 0.0, 0.0], "mass": 0.3}]}}})
    psi = config.construct.psi
    assert psi.atoms[0].mass == 0.3
    assert psi.regularize == 4


def test_build_map():
    F = build_map([
        {"kind": "dilation", "r": 2.0},
        {"kind": "translation", "u": [1.0, 0.0, 0.0]},
        {"kind": "flow", "potential": "t", "time": 0.5, "steps": 8},
    ])
    assert isinstance(F.word[0], Dilation)
    assert isinstance(F.word[1], LeftTranslation)
    assert isinstance(F.word[2], FlowMap)
    assert build_map([]).is_identity


def test_build_map_errors():
    with pytest.raises(ConfigError):
        build_map([{"kind": "dilation"}])
    with pytest.raises(ConfigError):
        build_map([{"kind": "dilation", "r": -1.0}])
    with pytest.raises(ConfigError):
        build_map([{"kind": "flow", "potential": "unknown"}])
