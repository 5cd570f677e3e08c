"""
Run configuration for the command-line driver.

Responsibilities:
- RunConfig: a tree of frozen settings dataclasses with explicit defaults.
- JSON schema (version 1) checked with jsonschema before any dataclass is built.
- Builders turning settings into library objects (measures, maps, grids).
- The config hash: SHA-256 of the canonical JSON of the resolved config.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import jsonschema

from heisenqc.contact.field import ContactField
from heisenqc.contact.potentials import from_name
from heisenqc.contact.tabulated import BoxGrid
from heisenqc.errors import ConfigError, DomainError
from heisenqc.flow.composed import ComposedMap, Dilation, LeftTranslation
from heisenqc.flow.integrator import FlowMap
from heisenqc.group.point import Point
from heisenqc.group.quadrature import QuadratureConfig
from heisenqc.iterate.budget import BudgetConfig
from heisenqc.metric.distance import CurveOptConfig
from heisenqc.potential.measure import Atom, Measure, regularize
from heisenqc.validators.fields import (
    validate_choice,
    validate_ladder,
    validate_point,
    validate_positive,
    validate_positive_int,
    validate_unit_point,
)
from heisenqc.verification.suites import VerifyConfig

SCHEMA_VERSION = 1

_NUMBER = {"type": "number"}
_INT = {"type": "integer", "minimum": 1}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_POINT = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}
_LADDER = {"type": "array", "items": _POSITIVE, "minItems": 1}

_MEASURE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["location", "mass"],
                "properties": {"location": _POINT, "mass": _NUMBER},
            },
        },
        "regularize": {"type": ["integer", "null"], "minimum": 1},
        "grid_resolution": {"type": "integer", "minimum": 2},
    },
}

_LETTER_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["dilation", "translation", "flow"]},
        "r": _POSITIVE,
        "u": _POINT,
        "potential": {"type": "string"},
        "params": {"type": "object"},
        "time": _NUMBER,
        "steps": _INT,
    },
    "additionalProperties": False,
}

_MAP_SCHEMA = {"type": "array", "items": _LETTER_SCHEMA}


def _section(properties: dict) -> dict:
    return {"type": "object", "additionalProperties": False, "properties": properties}


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer", "minimum": 0},
        "quadrature": _section({
            "mc_samples": _INT,
            "grid_resolution": {"type": "integer", "minimum": 2},
            "fd_step": _POSITIVE,
        }),
        "verify": _section({
            "group_cases": _INT,
            "bracket_points": _INT,
            "strain_resolution": _INT,
            "flow_points": _INT,
            "jacobian_points": _INT,
            "lambda_pairs": _INT,
            "metric_pairs": _INT,
            "ratio_pairs": _INT,
            "doubling_centers": _INT,
        }),
        "flow": _section({
            "potential": {"type": "string"},
            "params": {"type": "object"},
            "time": _NUMBER,
            "steps": _INT,
            "start": _POINT,
            "base_points": _INT,
            "volume_check": {"type": "boolean"},
            "strain_radius": _POSITIVE,
        }),
        "potential": _section({
            "measure": _MEASURE_SCHEMA,
            "grid_points": _INT,
            "grid_radius": _POSITIVE,
            "beta": _NUMBER,
            "smoothing_ladder": {"type": "array", "items": _INT, "minItems": 1},
            "restriction_ladder": _LADDER,
        }),
        "construct": _section({
            "map": _MAP_SCHEMA,
            "psi": _MEASURE_SCHEMA,
            "kernel_nodes": _INT,
            "grid_points": _INT,
            "grid_radius": _POSITIVE,
            "strain_radius": _POSITIVE,
        }),
        "iteration": _section({
            "m": _INT,
            "map": _MAP_SCHEMA,
            "psi": _MEASURE_SCHEMA,
            "p0": _POINT,
            "flow_steps": _INT,
            "table_radius": _POSITIVE,
            "jacobian_table_radius": _POSITIVE,
            "table_resolution": {"type": "integer", "minimum": 3},
            "kernel_nodes": _INT,
            "grid_points": _INT,
            "sweep": {"type": "array", "items": _INT},
            "budget": _section({
                "epsilon_prime": {"type": "number", "minimum": 0},
                "K": {"type": "number", "minimum": 1},
                "A1": _POSITIVE,
                "A2": _POSITIVE,
                "steps": _INT,
            }),
        }),
        "metric": _section({
            "map": _MAP_SCHEMA,
            "weight": {"enum": ["jacobian", "constant", "potential"]},
            "weight_constant": {"type": "number", "minimum": 0},
            "weight_measure": _MEASURE_SCHEMA,
            "pairs": _INT,
            "triples": {"type": "integer", "minimum": 0},
            "waypoint_ladder": {"type": "array", "items": _INT, "minItems": 1},
            "restarts": _INT,
            "maxiter": _INT,
            "doubling_radii": _LADDER,
        }),
        "output": _section({"directory": {"type": "string", "minLength": 1}}),
    },
}


def _pick(cls, data: dict, **converters) -> dict:
    """Keyword arguments for cls from the keys present in data."""
    kwargs = {}
    for key in cls.__dataclass_fields__:
        if key in data:
            value = data[key]
            kwargs[key] = converters[key](value) if key in converters else value
    return kwargs


def _tuple(value) -> tuple:
    return tuple(value)


@dataclass(frozen=True)
class MeasureSettings:
    """Atoms, optionally smoothed onto a grid with the mollifier at index `regularize`."""
    atoms: tuple = ()
    regularize: int | None = None
    grid_resolution: int = 8

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, Atom) else Atom.from_dict(a) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.regularize is not None:
            validate_positive_int("regularize", self.regularize)
        validate_positive_int("grid_resolution", self.grid_resolution)

    @classmethod
    def atom(cls, location, mass: float, regularize: int | None = None) -> "MeasureSettings":
        return cls((Atom(Point(*location), float(mass)),), regularize)

    def build(self, cfg: QuadratureConfig) -> Measure:
        mu = Measure(atoms=self.atoms)
        if self.regularize is None or not self.atoms:
            return mu
        return regularize(mu, self.regularize, replace(cfg, grid_resolution=self.grid_resolution))

    def to_dict(self) -> dict:
        return {
            "atoms": [a.to_dict() for a in self.atoms],
            "regularize": self.regularize,
            "grid_resolution": self.grid_resolution,
        }

    @classmethod
    def from_dict(cls, data: dict | None, default: "MeasureSettings | None" = None) -> "MeasureSettings":
        base = default or cls()
        if not data:
            return base
        return replace(base, **_pick(cls, data, atoms=_tuple))


def build_map(letters, cfg: QuadratureConfig | None = None) -> ComposedMap:
    """ComposedMap from a list of letter dicts; the empty list is the identity."""
    word = []
    for letter in letters:
        kind = letter.get("kind")
        try:
            if kind == "dilation":
                word.append(Dilation(float(letter["r"])))
            elif kind == "translation":
                word.append(LeftTranslation(Point(*letter["u"])))
            elif kind == "flow":
                phi = from_name(letter["potential"], letter.get("params"), cfg)
                word.append(FlowMap(ContactField(phi), float(letter.get("time", 1.0)), int(letter.get("steps", 64))))
            else:
                raise ConfigError(f"Unknown map letter kind '{kind}'")
        except KeyError as e:
            raise ConfigError(f"Map letter '{kind}' is missing {e}") from e
        except DomainError as e:
            raise ConfigError(f"Invalid map letter {letter}: {e}") from e
    return ComposedMap(tuple(word))


@dataclass(frozen=True)
class FlowSettings:
    potential: str = "radial-stretch"
    params: dict = field(default_factory=dict)
    time: float = 0.5
    steps: int = 256
    start: tuple = (1.0, 0.0, 0.0)
    base_points: int = 20
    volume_check: bool = True
    strain_radius: float = 2.0

    def __post_init__(self):
        validate_positive_int("flow.steps", self.steps)
        validate_positive_int("flow.base_points", self.base_points)
        validate_positive("flow.strain_radius", self.strain_radius)
        object.__setattr__(self, "start", validate_point("flow.start", self.start))

    def contact_field(self, cfg: QuadratureConfig) -> ContactField:
        return ContactField(from_name(self.potential, self.params, cfg))

    @property
    def step(self) -> float:
        return abs(self.time) / self.steps


@dataclass(frozen=True)
class PotentialSettings:
    measure: MeasureSettings = field(default_factory=lambda: MeasureSettings.atom((0.0, 0.0, 0.0), 1.0))
    grid_points: int = 256
    grid_radius: float = 2.0
    beta: float = 1.0
    smoothing_ladder: tuple = (2, 4, 8)
    restriction_ladder: tuple = (1.0, 2.0, 4.0)

    def __post_init__(self):
        validate_positive_int("potential.grid_points", self.grid_points)
        validate_positive("potential.grid_radius", self.grid_radius)
        object.__setattr__(self, "smoothing_ladder", validate_ladder("potential.smoothing_ladder", self.smoothing_ladder, int))
        object.__setattr__(self, "restriction_ladder", validate_ladder("potential.restriction_ladder", self.restriction_ladder))


@dataclass(frozen=True)
class ConstructSettings:
    map: tuple = ()
    psi: MeasureSettings = field(default_factory=lambda: MeasureSettings.atom((0.5, 0.0, 0.0), 0.1, regularize=4))
    kernel_nodes: int = 64
    grid_points: int = 64
    grid_radius: float = 2.0
    strain_radius: float = 1.0

    def __post_init__(self):
        validate_positive_int("construct.kernel_nodes", self.kernel_nodes)
        validate_positive_int("construct.grid_points", self.grid_points)
        validate_positive("construct.grid_radius", self.grid_radius)
        validate_positive("construct.strain_radius", self.strain_radius)


@dataclass(frozen=True)
class IterationSettings:
    m: int = 2
    map: tuple = ()
    psi: MeasureSettings = field(default_factory=lambda: MeasureSettings.atom((0.5, 0.0, 0.0), 0.05))
    p0: tuple = (1.0, 0.0, 0.0)
    flow_steps: int = 32
    table_radius: float = 4.0
    jacobian_table_radius: float = 8.0
    table_resolution: int = 17
    kernel_nodes: int = 64
    grid_points: int = 1000
    sweep: tuple = ()
    budget: BudgetConfig = field(default_factory=BudgetConfig)

    def __post_init__(self):
        validate_positive_int("iteration.m", self.m)
        validate_positive_int("iteration.flow_steps", self.flow_steps)
        validate_positive_int("iteration.kernel_nodes", self.kernel_nodes)
        validate_positive_int("iteration.grid_points", self.grid_points)
        validate_positive("iteration.table_radius", self.table_radius)
        validate_positive("iteration.jacobian_table_radius", self.jacobian_table_radius)
        object.__setattr__(self, "p0", validate_unit_point("iteration.p0", self.p0))
        if self.sweep:
            object.__setattr__(self, "sweep", validate_ladder("iteration.sweep", self.sweep, int))

    def table(self) -> BoxGrid:
        return BoxGrid.around_ball(self.table_radius, self.table_resolution)

    def jacobian_table(self) -> BoxGrid:
        return BoxGrid.around_ball(self.jacobian_table_radius, self.table_resolution)


@dataclass(frozen=True)
class MetricSettings:
    map: tuple = ()
    weight: str = "jacobian"
    weight_constant: float = 1.0
    weight_measure: MeasureSettings = field(default_factory=MeasureSettings)
    pairs: int = 20
    triples: int = 0
    waypoint_ladder: tuple = (4, 8, 16, 32)
    restarts: int = 3
    maxiter: int = 300
    doubling_radii: tuple = (0.125, 0.25, 0.5, 1.0)

    def __post_init__(self):
        validate_choice("metric.weight", self.weight, ("jacobian", "constant", "potential"))
        validate_positive_int("metric.pairs", self.pairs)
        object.__setattr__(self, "waypoint_ladder", validate_ladder("metric.waypoint_ladder", self.waypoint_ladder, int))
        object.__setattr__(self, "doubling_radii", validate_ladder("metric.doubling_radii", self.doubling_radii))

    def optimizer(self, seed: int) -> CurveOptConfig:
        return CurveOptConfig(
            waypoint_ladder=self.waypoint_ladder, restarts=self.restarts, maxiter=self.maxiter, seed=seed
        )


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    flow: FlowSettings = field(default_factory=FlowSettings)
    potential: PotentialSettings = field(default_factory=PotentialSettings)
    construct: ConstructSettings = field(default_factory=ConstructSettings)
    iteration: IterationSettings = field(default_factory=IterationSettings)
    metric: MetricSettings = field(default_factory=MetricSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def __post_init__(self):
        if int(self.seed) < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        # every random stream derives from the run seed
        if self.quadrature.rng_seed != self.seed:
            object.__setattr__(self, "quadrature", replace(self.quadrature, rng_seed=int(self.seed)))

    def with_overrides(self, seed: int | None = None, out: str | None = None) -> "RunConfig":
        config = self
        if seed is not None:
            config = replace(config, seed=int(seed))
        if out is not None:
            config = replace(config, output=OutputSettings(str(out)))
        return config

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "quadrature": {k: v for k, v in self.quadrature.to_dict().items() if k != "rng_seed"},
            "verify": self.verify.to_dict(),
            "flow": {
                "potential": self.flow.potential,
                "params": dict(self.flow.params),
                "time": self.flow.time,
                "steps": self.flow.steps,
                "start": list(self.flow.start),
                "base_points": self.flow.base_points,
                "volume_check": self.flow.volume_check,
                "strain_radius": self.flow.strain_radius,
            },
            "potential": {
                "measure": self.potential.measure.to_dict(),
                "grid_points": self.potential.grid_points,
                "grid_radius": self.potential.grid_radius,
                "beta": self.potential.beta,
                "smoothing_ladder": list(self.potential.smoothing_ladder),
                "restriction_ladder": list(self.potential.restriction_ladder),
            },
            "construct": {
                "map": [dict(letter) for letter in self.construct.map],
                "psi": self.construct.psi.to_dict(),
                "kernel_nodes": self.construct.kernel_nodes,
                "grid_points": self.construct.grid_points,
                "grid_radius": self.construct.grid_radius,
                "strain_radius": self.construct.strain_radius,
            },
            "iteration": {
                "m": self.iteration.m,
                "map": [dict(letter) for letter in self.iteration.map],
                "psi": self.iteration.psi.to_dict(),
                "p0": list(self.iteration.p0),
                "flow_steps": self.iteration.flow_steps,
                "table_radius": self.iteration.table_radius,
                "jacobian_table_radius": self.iteration.jacobian_table_radius,
                "table_resolution": self.iteration.table_resolution,
                "kernel_nodes": self.iteration.kernel_nodes,
                "grid_points": self.iteration.grid_points,
                "sweep": list(self.iteration.sweep),
                "budget": self.iteration.budget.to_dict(),
            },
            "metric": {
                "map": [dict(letter) for letter in self.metric.map],
                "weight": self.metric.weight,
                "weight_constant": self.metric.weight_constant,
                "weight_measure": self.metric.weight_measure.to_dict(),
                "pairs": self.metric.pairs,
                "triples": self.metric.triples,
                "waypoint_ladder": list(self.metric.waypoint_ladder),
                "restarts": self.metric.restarts,
                "maxiter": self.metric.maxiter,
                "doubling_radii": list(self.metric.doubling_radii),
            },
            "output": {"directory": self.output.directory},
        }

    @classmethod
    def from_dict(cls, data: dict | None) -> "RunConfig":
        """Validate against the schema, then merge over the defaults."""
        data = dict(data or {})
        try:
            jsonschema.validate(instance=data, schema=CONFIG_SCHEMA)
        except jsonschema.ValidationError as e:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise ConfigError(f"Config does not match schema at {where}: {e.message}") from e

        defaults = cls()
        seed = int(data.get("seed", defaults.seed))
        q = data.get("quadrature", {})
        iteration = data.get("iteration", {})
        metric = data.get("metric", {})
        construct = data.get("construct", {})
        potential = data.get("potential", {})
        return cls(
            seed=seed,
            quadrature=QuadratureConfig(rng_seed=seed, **_pick(QuadratureConfig, q)),
            verify=VerifyConfig(**data.get("verify", {})),
            flow=FlowSettings(**_pick(FlowSettings, data.get("flow", {}), start=_tuple)),
            potential=PotentialSettings(
                **_pick(
                    PotentialSettings,
                    potential,
                    measure=lambda m: MeasureSettings.from_dict(m, defaults.potential.measure),
                    smoothing_ladder=_tuple,
                    restriction_ladder=_tuple,
                )
            ),
            construct=ConstructSettings(
                **_pick(
                    ConstructSettings,
                    construct,
                    map=_tuple,
                    psi=lambda m: MeasureSettings.from_dict(m, defaults.construct.psi),
                )
            ),
            iteration=IterationSettings(
                **_pick(
                    IterationSettings,
                    iteration,
                    map=_tuple,
                    p0=_tuple,
                    sweep=_tuple,
                    psi=lambda m: MeasureSettings.from_dict(m, defaults.iteration.psi),
                    budget=lambda b: BudgetConfig(**b),
                )
            ),
            metric=MetricSettings(
                **_pick(
                    MetricSettings,
                    metric,
                    map=_tuple,
                    weight_measure=lambda m: MeasureSettings.from_dict(m),
                    waypoint_ladder=_tuple,
                    doubling_radii=_tuple,
                )
            ),
            output=OutputSettings(**data.get("output", {})),
        )


def config_hash(config: RunConfig) -> str:
    """SHA-256 over the canonical JSON of the resolved config."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
