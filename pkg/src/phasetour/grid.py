"""Phase-space points and grids over the [-1, 1]^m box.

A point in m-dimensional phase space holds m/2 positions followed by the
matching m/2 velocities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument


def _check_dim(m):
    if int(m) != m or m < 2 or m % 2:
        raise InvalidArgument(f"phase dimension must be an even integer >= 2, got {m}")
    return int(m)


@dataclass(frozen=True)
class PhasePoint:
    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        _check_dim(len(coords))
        if any(not -1.0 <= c <= 1.0 for c in coords):
            raise InvalidArgument(f"coordinates must lie in [-1, 1]: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def positions(self) -> tuple:
        return self.coords[: self.dim // 2]

    @property
    def velocities(self) -> tuple:
        return self.coords[self.dim // 2 :]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True, eq=False)
class Grid:
    """Immutable ordered point set.

    ``points`` is an (n, m) float array marked read-only. ``kind`` is
    ``"rect"`` or ``"rand"``; ``n_per_axis`` is set for rectangular grids
    and ``seed`` for random ones.
    """

    points: np.ndarray
    kind: str
    n_per_axis: Optional[int] = None
    seed: Optional[int] = None
    id: str = field(default="", compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidArgument("points must be a 2-D array")
        _check_dim(pts.shape[1])
        if pts.shape[0] < 2:
            raise InvalidArgument("a grid needs at least 2 points")
        if np.any(np.abs(pts) > 1.0):
            raise InvalidArgument("grid coordinates must lie in [-1, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if not self.id:
            # local import: persistence depends on this module
            from .store import grid_id

            object.__setattr__(self, "id", grid_id(self))

    @property
    def dim_m(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.n_per_axis == other.n_per_axis
            and self.seed == other.seed
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None


def axis_values(n_per_axis: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, n_per_axis)


def make_rect_grid(m: int, n_per_axis: int) -> Grid:
    """N**m points, row-major with the last axis varying fastest."""
    m = _check_dim(m)
    if int(n_per_axis) != n_per_axis or n_per_axis < 2:
        raise InvalidArgument(f"points per axis must be an integer >= 2, got {n_per_axis}")
    n_per_axis = int(n_per_axis)
    vals = axis_values(n_per_axis)
    pts = np.array(list(itertools.product(vals, repeat=m)), dtype=float)
    return Grid(pts, kind="rect", n_per_axis=n_per_axis)


def make_random_grid(m: int, count: int, seed: int) -> Grid:
    # PCG64 output is specified independently of platform.
    m = _check_dim(m)
    if int(count) != count or count < 2:
        raise InvalidArgument(f"random grid needs count >= 2, got {count}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    pts = rng.uniform(-1.0, 1.0, size=(int(count), m))
    return Grid(pts, kind="rand", seed=int(seed))


def index_to_point(grid: Grid, idx: int) -> PhasePoint:
    if not 0 <= idx < len(grid):
        raise IndexError(f"point index {idx} out of range for {len(grid)}-point grid")
    return PhasePoint(tuple(grid.points[idx]))


def as_coords(p) -> np.ndarray:
    """Coordinates of a PhasePoint or any 1-D sequence as a float array."""
    if isinstance(p, PhasePoint):
        return p.as_array()
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgument("a phase point must be one-dimensional")
    _check_dim(arr.shape[0])
    return arr


def stack_points(points: Sequence) -> np.ndarray:
    return np.vstack([as_coords(p) for p in points])
