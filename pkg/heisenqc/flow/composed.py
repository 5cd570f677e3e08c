"""
Finite words in flow maps, dilations and left translations.

A ComposedMap applies its letters in order: word[0] first, word[-1] last.
Its inverse is the reversed word of letter inverses, so no pointwise
numerical inversion is ever needed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from heisenqc.errors import DomainError
from heisenqc.group.point import Point, as_points, dilate, mul

log = logging.getLogger(__name__)


@runtime_checkable
class MapLetter(Protocol):
    has_constant_jacobian: bool

    def apply(self, points) -> np.ndarray: ...

    def inverse(self) -> "MapLetter": ...

    def log_jacobian(self, points) -> np.ndarray: ...

    def horizontal_differential(self, points) -> np.ndarray: ...

    def describe(self) -> dict: ...


@dataclass(frozen=True)
class Dilation:
    """δ_r; Jacobian r⁴, horizontal differential r·I."""
    r: float
    has_constant_jacobian = True

    def __post_init__(self):
        if not (self.r > 0 and np.isfinite(self.r)):
            raise DomainError(f"Dilation factor must be positive, got {self.r}")

    def apply(self, points) -> np.ndarray:
        return dilate(self.r, points)

    def inverse(self) -> "Dilation":
        return Dilation(1.0 / self.r)

    def log_jacobian(self, points) -> np.ndarray:
        pts = np.atleast_2d(as_points(points))
        return np.full(pts.shape[0], 4.0 * np.log(self.r))

    def horizontal_differential(self, points) -> np.ndarray:
        pts = np.atleast_2d(as_points(points))
        return np.tile(self.r * np.eye(2), (pts.shape[0], 1, 1))

    def describe(self) -> dict:
        return {"kind": "dilation", "r": self.r}


@dataclass(frozen=True)
class LeftTranslation:
    """L_u(p) = u ⋆ p; Jacobian 1, horizontal differential I."""
    u: Point
    has_constant_jacobian = True

    def apply(self, points) -> np.ndarray:
        return mul(self.u, points)

    def inverse(self) -> "LeftTranslation":
        return LeftTranslation(self.u.inverse())

    def log_jacobian(self, points) -> np.ndarray:
        return np.zeros(np.atleast_2d(as_points(points)).shape[0])

    def horizontal_differential(self, points) -> np.ndarray:
        pts = np.atleast_2d(as_points(points))
        return np.tile(np.eye(2), (pts.shape[0], 1, 1))

    def describe(self) -> dict:
        return {"kind": "translation", "u": self.u.to_list()}


@dataclass(frozen=True)
class ComposedMap:
    """F = word[-1] ∘ … ∘ word[0]."""
    word: tuple = field(default_factory=tuple)

    @classmethod
    def identity(cls) -> "ComposedMap":
        return cls(())

    @classmethod
    def of(cls, *letters) -> "ComposedMap":
        return cls(tuple(letters))

    @property
    def is_identity(self) -> bool:
        return len(self.word) == 0

    @property
    def has_constant_jacobian(self) -> bool:
        return all(letter.has_constant_jacobian for letter in self.word)

    def then(self, *letters) -> "ComposedMap":
        """Post-compose with further letters."""
        return ComposedMap(self.word + tuple(letters))

    def compose(self, other: "ComposedMap") -> "ComposedMap":
        """self ∘ other."""
        return ComposedMap(other.word + self.word)

    def inverse(self) -> "ComposedMap":
        return ComposedMap(tuple(letter.inverse() for letter in reversed(self.word)))

    def apply(self, points) -> np.ndarray:
        pts = np.array(as_points(points), dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        for letter in self.word:
            pts = letter.apply(pts)
        return pts[0] if single else pts

    def inverse_apply(self, points) -> np.ndarray:
        return self.inverse().apply(points)

    def constant_log_jacobian(self) -> float:
        """Σ log J over letters; valid only without flow letters."""
        if not self.has_constant_jacobian:
            raise DomainError("Word contains flow letters; the Jacobian is not constant")
        origin = np.zeros((1, 3))
        return float(sum(letter.log_jacobian(origin)[0] for letter in self.word))

    def log_jacobian(self, points) -> np.ndarray:
        """log J_F by the chain rule: the sum of letter log-Jacobians along the orbit."""
        pts = np.array(np.atleast_2d(as_points(points)), dtype=float)
        if self.has_constant_jacobian:
            return np.full(pts.shape[0], self.constant_log_jacobian())
        total = np.zeros(pts.shape[0])
        for letter in self.word:
            total += letter.log_jacobian(pts)
            pts = letter.apply(pts)
        return total

    def jacobian(self, points) -> np.ndarray:
        return np.exp(self.log_jacobian(points))

    def horizontal_differential(self, points) -> np.ndarray:
        """D_H F = D_H w_n(·) ⋯ D_H w_1(p), shape (N, 2, 2)."""
        pts = np.array(np.atleast_2d(as_points(points)), dtype=float)
        out = np.tile(np.eye(2), (pts.shape[0], 1, 1))
        for letter in self.word:
            if hasattr(letter, "with_differential"):
                end, A, _ = letter.with_differential(pts)
            else:
                A = letter.horizontal_differential(pts)
                end = letter.apply(pts)
            out = A @ out
            pts = end
        return out

    def describe(self) -> list[dict]:
        return [letter.describe() for letter in self.word]

    def __len__(self) -> int:
        return len(self.word)


def translation(u) -> LeftTranslation:
    return LeftTranslation(u if isinstance(u, Point) else Point.from_array(u))


def word(*letters) -> ComposedMap:
    return ComposedMap(tuple(letters))


def as_composed(F) -> ComposedMap:
    """Wrap a single letter (or pass a ComposedMap through)."""
    return F if isinstance(F, ComposedMap) else ComposedMap((F,))
