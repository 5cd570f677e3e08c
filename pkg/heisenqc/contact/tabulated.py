"""
Potentials and Jacobians sampled once on a centered box grid and read back
by linear interpolation.

The grid resolution is odd so that the origin is a node; derivatives come
from np.gradient on the tables, converted to the frame with
X = ∂x + 2y∂t and Y = ∂y − 2x∂t. Points outside the box raise
FlowEscapeError unless the table was built with outside=True.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from heisenqc.contact.field import PotentialField
from heisenqc.errors import DomainError, FlowEscapeError
from heisenqc.group.point import as_points

log = logging.getLogger(__name__)

# points per table evaluation call
_BATCH = 200_000


@dataclass(frozen=True)
class BoxGrid:
    """Axes linspace(−h_i, h_i, n) for i = x, y, t."""
    half_widths: tuple[float, float, float]
    resolution: int = 33

    def __post_init__(self):
        half = tuple(float(h) for h in self.half_widths)
        if len(half) != 3 or any(not (h > 0 and np.isfinite(h)) for h in half):
            raise DomainError(f"Box half widths must be three positive numbers, got {self.half_widths}")
        n = int(self.resolution)
        if n < 3:
            raise DomainError(f"Box resolution must be at least 3, got {n}")
        object.__setattr__(self, "half_widths", half)
        # keep the origin on a node
        object.__setattr__(self, "resolution", n if n % 2 else n + 1)

    @classmethod
    def around_ball(cls, radius: float, resolution: int = 33) -> "BoxGrid":
        """Smallest centered box holding B(radius)."""
        return cls((radius, radius, radius * radius), resolution)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(-h, h, self.resolution) for h in self.half_widths]

    @property
    def spacing(self) -> np.ndarray:
        return np.array([2.0 * h / (self.resolution - 1) for h in self.half_widths])

    def nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, 3)

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(as_points(points))
        return np.all(np.abs(p) <= np.array(self.half_widths) * (1.0 + 1e-12), axis=-1)

    def shape(self) -> tuple[int, int, int]:
        return (self.resolution,) * 3

    def to_dict(self) -> dict:
        return {"half_widths": list(self.half_widths), "resolution": self.resolution}


def _tabulate(fn, grid: BoxGrid) -> np.ndarray:
    nodes = grid.nodes()
    out = np.concatenate([np.asarray(fn(nodes[i:i + _BATCH]), dtype=float)
                          for i in range(0, nodes.shape[0], _BATCH)])
    return out.reshape(grid.shape())


def _tabulate_or_nan(fn, grid: BoxGrid, chunk: int = 256) -> np.ndarray:
    """Like _tabulate, with NaN at the nodes whose evaluation escapes a table box."""
    nodes = grid.nodes()
    out = np.full(nodes.shape[0], np.nan)
    for i in range(0, nodes.shape[0], chunk):
        block = nodes[i:i + chunk]
        try:
            out[i:i + chunk] = fn(block)
        except FlowEscapeError:
            for k, p in enumerate(block):
                try:
                    out[i + k] = float(np.asarray(fn(p[None, :]), dtype=float).reshape(-1)[0])
                except FlowEscapeError:
                    pass
    return out.reshape(grid.shape())


def _frame_gradient(values: np.ndarray, grid: BoxGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(X, Y, T) derivatives of a table by second-order differences."""
    dx, dy, dt = np.gradient(values, *grid.axes(), edge_order=2)
    xs, ys, _ = np.meshgrid(*grid.axes(), indexing="ij")
    return dx + 2.0 * ys * dt, dy - 2.0 * xs * dt, dt


class TabulatedPotential(PotentialField):
    """φ and its first and second horizontal derivatives read from tables.

    Points outside the box raise FlowEscapeError, unless `outside` is set:
    then φ itself is evaluated there.
    """

    def __init__(self, phi: PotentialField, grid: BoxGrid, name: str | None = None, outside: bool = False):
        values = _tabulate(phi, grid)
        X, Y, T = _frame_gradient(values, grid)
        XX, YX, _ = _frame_gradient(X, grid)
        XY, YY, _ = _frame_gradient(Y, grid)
        axes = grid.axes()

        def interpolator(table):
            return RegularGridInterpolator(axes, table, method="linear")

        self.grid = grid
        self.source = phi
        self.outside = outside
        self._tables = {
            "value": interpolator(values),
            "gradient": [interpolator(t) for t in (X, Y, T)],
            # H[i, j] = X_i(X_j φ)
            "hessian": [interpolator(t) for t in (XX, XY, YX, YY)],
        }
        log.debug("tabulated %s on %d nodes", phi.name, values.size)
        super().__init__(
            self._read_value,
            gradient=self._read_gradient,
            hessian=self._read_hessian,
            name=name or f"tabulated({phi.name})",
            cfg=phi.cfg,
        )

    def _read(self, points: np.ndarray, table_fn, exact_fn) -> np.ndarray:
        p = np.atleast_2d(points)
        inside = self.grid.contains(p)
        half = np.array(self.grid.half_widths)
        if np.all(inside):
            return table_fn(np.clip(p, -half, half))
        if not self.outside:
            worst = p[~inside][0]
            raise FlowEscapeError(
                f"Point {worst.tolist()} left the table box {list(self.grid.half_widths)}",
                trajectory=p[~inside],
            )
        exact = np.asarray(exact_fn(p[~inside]), dtype=float)
        out = np.empty((p.shape[0],) + exact.shape[1:])
        out[~inside] = exact
        if np.any(inside):
            out[inside] = table_fn(np.clip(p[inside], -half, half))
        return out

    def _read_value(self, points):
        return self._read(points, self._tables["value"], self.source)

    def _read_gradient(self, points):
        def table_fn(p):
            return np.stack([table(p) for table in self._tables["gradient"]], axis=-1)

        return self._read(points, table_fn, self.source.horizontal_gradient)

    def _read_hessian(self, points):
        def table_fn(p):
            return np.stack([table(p) for table in self._tables["hessian"]], axis=-1).reshape(-1, 2, 2)

        return self._read(points, table_fn, self.source.horizontal_hessian)


class JacobianTable:
    """log J of a map interpolated on a box; exact evaluation outside it.

    Nodes where the map cannot be evaluated are stored as NaN, and any cell
    touching one falls back to exact evaluation as well. With clamp=True,
    points outside the box read the table at the nearest box point instead
    of evaluating the wrapped map.

    Every other attribute is forwarded to the wrapped map, so a JacobianTable
    can stand in for it inside kernels.
    """

    has_constant_jacobian = False

    def __init__(self, F, grid: BoxGrid, clamp: bool = False):
        self.map = F
        self.grid = grid
        self.clamp = clamp
        table = _tabulate_or_nan(F.log_jacobian, grid)
        self._interp = RegularGridInterpolator(grid.axes(), table, method="linear")
        log.debug("tabulated log J on %d nodes, %d unreachable", table.size, int(np.isnan(table).sum()))

    def log_jacobian(self, points) -> np.ndarray:
        p = np.atleast_2d(as_points(points))
        if self.clamp:
            half = np.array(self.grid.half_widths)
            p = np.clip(p, -half, half)
        inside = self.grid.contains(p)
        out = np.empty(p.shape[0])
        out[~inside] = np.nan
        if np.any(inside):
            out[inside] = self._interp(p[inside])
        exact = np.isnan(out)
        if np.any(exact):
            out[exact] = self.map.log_jacobian(p[exact])
        return out

    def __getattr__(self, name):
        return getattr(self.map, name)
