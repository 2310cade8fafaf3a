"""Uniform grids, grid functions, difference quotients, and discrete norms."""

from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss

from monoscheme.exceptions import PreconditionError
from monoscheme.types import Array, Boundary, Interval, RealFn

GAUSS_ORDER = 5
"""Points per cell in composite Gauss-Legendre cell averages."""
_NODES, _WEIGHTS = leggauss(GAUSS_ORDER)
NESTING_TOL = 1e-9
"""Relative tolerance when matching the domains of nested grids."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of `n_cells` cells of width `dx` starting at `x_left`.

    Cell `j` occupies `(x_left + j*dx, x_left + (j+1)*dx]`.
    """

    x_left: float
    dx: float
    n_cells: int
    boundary: Boundary = "periodic"

    def __post_init__(self):
        if not self.dx > 0:
            raise PreconditionError(f"Cell width must be positive, got {self.dx}.")
        if self.n_cells < 3:  # noqa: PLR2004
            raise PreconditionError(
                f"Three-point stencils need at least three cells, got {self.n_cells}."
            )
        if self.boundary not in ("periodic", "extrapolate"):
            raise PreconditionError(f"Unknown boundary policy '{self.boundary}'.")

    @classmethod
    def over(cls, domain: Interval, n_cells: int, boundary: Boundary) -> Self:
        """Grid of `n_cells` cells spanning `domain`."""
        low, high = domain
        return cls(low, (high - low) / n_cells, n_cells, boundary)

    @property
    def x_right(self) -> float:
        return self.x_left + self.n_cells * self.dx

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def centers(self) -> Array:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> Array:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    def refined(self, k: int) -> Self:
        """This grid with every cell split into `2**k` cells."""
        return type(self)(
            self.x_left, self.dx / 2**k, self.n_cells * 2**k, self.boundary
        )

    def nested_in(self, fine: "Grid1D") -> int | None:
        """Return `k` such that `fine` is this grid refined `k` times, or `None`."""
        ratio, remainder = divmod(fine.n_cells, self.n_cells)
        if remainder or ratio & (ratio - 1) or fine.boundary != self.boundary:
            return None
        scale = NESTING_TOL * self.length
        if abs(fine.x_left - self.x_left) > scale or abs(fine.length - self.length) > (
            scale
        ):
            return None
        return ratio.bit_length() - 1


@dataclass(frozen=True)
class GridFunction:
    """Piecewise-constant profile with one finite value per grid cell."""

    grid: Grid1D
    values: Array = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n_cells,):
            raise PreconditionError(
                f"Expected {self.grid.n_cells} values, got shape {values.shape}."
            )
        if not np.all(np.isfinite(values)):
            raise PreconditionError("Grid function values must be finite.")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.n_cells

    def with_values(self, values: Array) -> Self:
        """Grid function on the same grid with new values."""
        return type(self)(self.grid, values)

    def padded(self) -> Array:
        """Values with one ghost cell on each side, per the boundary policy."""
        return pad(self.values, self.grid.boundary)

    @property
    def mass(self) -> float:
        """Integral of the profile, `dx * sum(u_j)`."""
        return self.grid.dx * float(np.sum(self.values))

    @property
    def value_range(self) -> Interval:
        return float(self.values.min()), float(self.values.max())

    def to_csv(self, path: Path):
        """Write cell centers and values."""
        pd.DataFrame({"x": self.grid.centers, "u": self.values}).to_csv(
            path, index=False, float_format="%.17g", encoding="utf-8", lineterminator="\n"
        )

    @classmethod
    def read_csv(cls, path: Path, boundary: Boundary = "periodic") -> Self:
        """Read a profile written by `to_csv`."""
        df = pd.read_csv(path, float_precision="round_trip")
        x = df["x"].to_numpy(dtype=np.float64)
        if len(x) < 2:  # noqa: PLR2004
            raise PreconditionError(f"Too few rows in {path}.")
        dx = float(np.mean(np.diff(x)))
        return cls(Grid1D(float(x[0] - dx / 2), dx, len(x), boundary), df["u"])


def pad(values: Array, boundary: Boundary) -> Array:
    """Extend `values` by one ghost cell on each side."""
    if boundary == "periodic":
        return np.concatenate(([values[-1]], values, [values[0]]))
    return np.concatenate(([values[0]], values, [values[-1]]))


def sample_interval(interval: Interval, n_samples: int) -> Array:
    """Evenly spaced samples of a closed interval, endpoints included."""
    return np.linspace(*interval, n_samples)


def cell_average_project(
    u0: RealFn, grid: Grid1D, breakpoints: Iterable[float] = ()
) -> GridFunction:
    """Cell averages of `u0` by composite Gauss-Legendre quadrature.

    Cells containing one of `breakpoints` in their interior are split there, so that
    jumps of `u0` do not spoil the quadrature.
    """
    faces = grid.faces
    half = grid.dx / 2
    x = grid.centers[:, None] + half * _NODES[None, :]
    averages = _evaluate(u0, x) @ _WEIGHTS / 2
    for point in sorted(set(breakpoints)):
        j = int(np.floor((point - grid.x_left) / grid.dx))
        if not 0 <= j < grid.n_cells or point in (faces[j], faces[j + 1]):
            continue
        edges = [faces[j], *[p for p in breakpoints if faces[j] < p < faces[j + 1]]]
        edges = np.unique([*edges, faces[j + 1]])
        total = 0.0
        for low, high in zip(edges[:-1], edges[1:], strict=True):
            mid, rad = (low + high) / 2, (high - low) / 2
            total += rad * float(_evaluate(u0, mid + rad * _NODES) @ _WEIGHTS)
        averages[j] = total / grid.dx
    if not np.all(np.isfinite(averages)):
        raise PreconditionError("Initial data has non-finite cell averages.")
    return GridFunction(grid, averages)


def _evaluate(func: RealFn, x: Array) -> Array:
    return np.broadcast_to(np.asarray(func(x), dtype=np.float64), x.shape).copy()


def _face_quotients(v: GridFunction) -> Array:
    """Forward differences on every face, ghost faces included."""
    return np.diff(v.padded()) / v.grid.dx


def d_plus(v: GridFunction) -> GridFunction:
    """Forward difference quotient `(v[j+1] - v[j]) / dx`."""
    return v.with_values(_face_quotients(v)[1:])


def d_minus(v: GridFunction) -> GridFunction:
    """Backward difference quotient `(v[j] - v[j-1]) / dx`."""
    return v.with_values(_face_quotients(v)[:-1])


def d_minus_d_plus(v: GridFunction) -> GridFunction:
    """Second difference quotient `(v[j+1] - 2 v[j] + v[j-1]) / dx**2`."""
    return v.with_values(np.diff(_face_quotients(v)) / v.grid.dx)


def norm_l1(v: GridFunction) -> float:
    return v.grid.dx * float(np.sum(np.abs(v.values)))


def norm_linf(v: GridFunction) -> float:
    return float(np.max(np.abs(v.values)))


def bv_seminorm(v: GridFunction) -> float:
    """Total variation over interior faces, plus the wrap face when periodic."""
    total = float(np.sum(np.abs(np.diff(v.values))))
    if v.grid.boundary == "periodic":
        total += abs(float(v.values[0] - v.values[-1]))
    return total


def distance_l1(u: GridFunction, v: GridFunction) -> float:
    """The l1 distance between two profiles on the same grid."""
    if u.grid != v.grid:
        raise PreconditionError("Profiles live on different grids.")
    return u.grid.dx * float(np.sum(np.abs(u.values - v.values)))


def refine(v: GridFunction, k: int) -> GridFunction:
    """Replicate each cell value `2**k` times on the refined grid."""
    return GridFunction(v.grid.refined(k), np.repeat(v.values, 2**k))


def restrict(fine: GridFunction, coarse: Grid1D) -> GridFunction:
    """Average nested fine cells onto `coarse`."""
    k = coarse.nested_in(fine.grid)
    if k is None:
        raise PreconditionError(
            f"Grid with {fine.grid.n_cells} cells is not a refinement of one with"
            f" {coarse.n_cells} cells on the same domain."
        )
    return GridFunction(coarse, fine.values.reshape(coarse.n_cells, 2**k).mean(axis=1))
