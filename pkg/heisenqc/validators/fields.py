"""
Shared validation helpers for configuration fields.

Each helper raises ConfigError naming the offending field and returns the
normalized value where there is one to return.
"""

import numpy as np

from heisenqc.errors import ConfigError
from heisenqc.group.point import gauge

UNIT_TOLERANCE = 1e-9


def validate_positive_int(name: str, value) -> int:
    """Accept integers ≥ 1 (bool excluded)."""
    if isinstance(value, bool) or int(value) != value or int(value) < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def validate_positive(name: str, value) -> float:
    value = float(value)
    if not (value > 0 and np.isfinite(value)):
        raise ConfigError(f"{name} must be a positive number, got {value!r}")
    return value


def validate_choice(name: str, value, choices) -> str:
    if value not in choices:
        raise ConfigError(f"{name} must be one of {list(choices)}, got {value!r}")
    return value


def validate_point(name: str, value) -> tuple[float, float, float]:
    try:
        point = tuple(float(c) for c in value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be three numbers, got {value!r}") from e
    if len(point) != 3 or not all(np.isfinite(point)):
        raise ConfigError(f"{name} must be three finite numbers, got {value!r}")
    return point


def validate_unit_point(name: str, value) -> tuple[float, float, float]:
    """A point on the unit gauge sphere."""
    point = validate_point(name, value)
    if abs(float(gauge(np.array(point))) - 1.0) > UNIT_TOLERANCE:
        raise ConfigError(f"{name} must have gauge 1, got {float(gauge(np.array(point))):.6g}")
    return point


def validate_ladder(name: str, values, kind=float) -> tuple:
    """Non-empty, positive, strictly increasing."""
    ladder = tuple(kind(v) for v in values)
    if not ladder or any(v <= 0 for v in ladder):
        raise ConfigError(f"{name} must be a non-empty list of positive values, got {list(values)!r}")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError(f"{name} must be strictly increasing, got {list(ladder)!r}")
    return ladder


def validate_filter(value: str | None, known) -> str | None:
    """--filter NAME must name one of the verification groups."""
    if value is None:
        return None
    name = value.strip().lower()
    if name not in known:
        raise ConfigError(f"Unknown filter '{value}'. Known: {sorted(known)}")
    return name
