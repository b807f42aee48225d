"""Uniform grids on [0, 1] and the functions sampled on them.

Every numeric module in the package works with node samples on the grid
``x_j = j/m``.  Between nodes a :class:`GridFn` is read as its piecewise-linear
interpolant, which is why the default quadrature is the composite trapezoid
rule.  The solvers read coefficients through the local 4-point cubic
interpolant instead (``order=4``, :func:`cubic_samples`), which keeps them
fourth-order accurate on smooth data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, GridMismatchError

MIN_INTERVALS = 16
DEFAULT_INTERVALS = 1024


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``m`` intervals on [0, 1]."""

    m: int = DEFAULT_INTERVALS

    def __post_init__(self):
        if int(self.m) != self.m or self.m < MIN_INTERVALS:
            raise DomainError(f"grid needs an integer m >= {MIN_INTERVALS}, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def step(self) -> float:
        return 1.0 / self.m

    @property
    def nodes(self) -> np.ndarray:
        x = np.arange(self.m + 1, dtype=float) / self.m
        x.flags.writeable = False
        return x

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.m * factor)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GridFn:
    """Real function sampled at the ``m + 1`` nodes of ``grid``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.m + 1,):
            raise GridMismatchError(
                f"expected {self.grid.m + 1} values for m={self.grid.m}, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("GridFn values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> "GridFn":
        return cls(grid, np.broadcast_to(f(grid.nodes), (grid.m + 1,)))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFn":
        return cls(grid, np.full(grid.m + 1, float(c)))

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values) -> "GridFn":
        return GridFn(self.grid, values)

    def to_dict(self) -> dict:
        return {"m": self.grid.m, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GridFn":
        m = int(data["m"])
        values = data["values"]
        if len(values) != m + 1:
            raise GridMismatchError(f"'values' has {len(values)} entries, expected m+1={m + 1}")
        return cls(Grid(m), values)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GridFn":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"GridFn(m={self.grid.m}, min={self.values.min():.4g}, max={self.values.max():.4g})"


def same_grid(*fns) -> Grid:
    grid = fns[0].grid
    for f in fns[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: m={grid.m} vs m={f.grid.m}")
    return grid


@dataclass(frozen=True, eq=False)
class MatrixGridFn:
    """2x2 matrix-valued grid function stored entrywise."""

    e11: GridFn
    e12: GridFn
    e21: GridFn
    e22: GridFn

    def __post_init__(self):
        same_grid(self.e11, self.e12, self.e21, self.e22)

    @property
    def grid(self) -> Grid:
        return self.e11.grid

    @classmethod
    def symmetric(cls, e11: GridFn, e12: GridFn, e22: GridFn) -> "MatrixGridFn":
        return cls(e11, e12, e12, e22)

    @classmethod
    def from_array(cls, grid: Grid, arr) -> "MatrixGridFn":
        """Build from an array of shape (m+1, 2, 2)."""
        arr = np.asarray(arr, dtype=float)
        return cls(*(GridFn(grid, arr[:, i, j]) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))))

    def as_array(self) -> np.ndarray:
        out = np.empty((self.grid.m + 1, 2, 2))
        out[:, 0, 0] = self.e11.values
        out[:, 0, 1] = self.e12.values
        out[:, 1, 0] = self.e21.values
        out[:, 1, 1] = self.e22.values
        return out

    def trace(self) -> GridFn:
        return GridFn(self.grid, self.e11.values + self.e22.values)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.e12.values - self.e21.values) <= atol))


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.m + 1, grid.step)
    w[0] = w[-1] = 0.5 * grid.step
    return w


def _lagrange_weights(nodes, t) -> np.ndarray:
    """Weights of the Lagrange interpolant through ``nodes`` evaluated at ``t``."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(len(nodes))
    for i, xi in enumerate(nodes):
        for k, xk in enumerate(nodes):
            if k != i:
                w[i] *= (t - xk) / (xi - xk)
    return w


def _cubic_stencils(values: np.ndarray, weights_of):
    """Apply per-cell 4-point stencils: centred inside, one-sided in the end cells.

    ``weights_of(offsets)`` returns the weights for stencil nodes given as
    offsets from the cell's left node.
    """
    v = np.asarray(values, dtype=float)
    m = len(v) - 1
    centre = weights_of((-1, 0, 1, 2))
    out = np.empty(m)
    out[1:m - 1] = centre[0] * v[:m - 2] + centre[1] * v[1:m - 1] + centre[2] * v[2:m] + centre[3] * v[3:]
    out[0] = weights_of((0, 1, 2, 3)) @ v[:4]
    out[m - 1] = weights_of((-2, -1, 0, 1)) @ v[m - 3:]
    return out


def cubic_samples(values: np.ndarray, t: float) -> np.ndarray:
    """Local cubic interpolant sampled at ``x_j + t h`` in every cell, 0 <= t <= 1."""
    return _cubic_stencils(values, lambda offs: _lagrange_weights(offs, t))


def _cubic_cell_weights(offsets) -> np.ndarray:
    # exact integrals over [0, 1] of the Lagrange basis, by 2-point Gauss-Legendre
    g = 0.5 / math.sqrt(3.0)
    return 0.5 * (_lagrange_weights(offsets, 0.5 - g) + _lagrange_weights(offsets, 0.5 + g))


def antiderivative_values(values: np.ndarray, step: float, order: int = 2) -> np.ndarray:
    """Cumulative integral at the nodes.

    ``order=2`` integrates the piecewise-linear interpolant (trapezoid);
    ``order=4`` integrates the local 4-point cubic interpolant of each cell.
    """
    values = np.asarray(values, dtype=float)
    if order == 2:
        cells = 0.5 * step * (values[1:] + values[:-1])
    elif order == 4:
        cells = step * _cubic_stencils(values, _cubic_cell_weights)
    else:
        raise DomainError(f"order must be 2 or 4, got {order}")
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(cells, out=out[1:])
    return out


def integrate(f: GridFn, order: int = 2) -> float:
    """Integral of ``f`` over [0, 1]; composite trapezoid unless ``order=4``."""
    return float(antiderivative_values(f.values, f.grid.step, order)[-1])


def antiderivative(f: GridFn, order: int = 2) -> GridFn:
    """Cumulative integral ``F(x_j) = int_0^{x_j} f`` with ``F(0) = 0``."""
    return GridFn(f.grid, antiderivative_values(f.values, f.grid.step, order))


def interpolate(f: GridFn, x: float) -> float:
    """Piecewise-linear interpolant of ``f`` at ``x`` in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    return float(np.interp(x, f.grid.nodes, f.values))


def l2_norm(f: GridFn) -> float:
    return float(np.sqrt(integrate(GridFn(f.grid, f.values**2))))


def resample(f: GridFn, grid: Grid) -> GridFn:
    """Linear resampling of ``f`` onto another grid."""
    return GridFn(grid, np.interp(grid.nodes, f.grid.nodes, f.values))
