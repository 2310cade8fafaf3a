"""Grids, grid functions, difference quotients, and norms."""

from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoscheme.exceptions import PreconditionError
from monoscheme.grid import (
    Grid1D,
    GridFunction,
    bv_seminorm,
    cell_average_project,
    d_minus,
    d_minus_d_plus,
    d_plus,
    distance_l1,
    norm_l1,
    norm_linf,
    refine,
    restrict,
)


def test_grid_geometry():
    grid = Grid1D.over((-2.0, 2.0), 8, "extrapolate")
    assert grid.dx == 0.5
    assert grid.x_right == 2.0
    assert_allclose(grid.centers, np.arange(-1.75, 2.0, 0.5))
    assert len(grid.faces) == 9


@pytest.mark.parametrize(
    ("dx", "n_cells"), [(0.0, 8), (-1.0, 8), (0.1, 2)], ids=["zero", "negative", "few"]
)
def test_grid_rejects_bad_geometry(dx: float, n_cells: int):
    with pytest.raises(PreconditionError):
        Grid1D(0.0, dx, n_cells)


def test_grid_function_is_read_only(periodic_grid: Grid1D):
    v = GridFunction(periodic_grid, np.zeros(32))
    with pytest.raises(ValueError, match="read-only"):
        v.values[0] = 1.0


@pytest.mark.parametrize("bad", [np.zeros(31), np.full(32, np.nan)])
def test_grid_function_rejects_bad_values(periodic_grid: Grid1D, bad: np.ndarray):
    with pytest.raises(PreconditionError):
        GridFunction(periodic_grid, bad)


def test_padding():
    values = np.array([1.0, 2.0, 3.0])
    periodic = GridFunction(Grid1D(0, 1, 3, "periodic"), values)
    extrapolate = GridFunction(Grid1D(0, 1, 3, "extrapolate"), values)
    assert_allclose(periodic.padded(), [3, 1, 2, 3, 1])
    assert_allclose(extrapolate.padded(), [1, 1, 2, 3, 3])


def test_projection_of_constant_is_exact(periodic_grid: Grid1D):
    v = cell_average_project(lambda x: 2.5, periodic_grid)  # pyright: ignore[reportArgumentType]
    assert_allclose(v.values, 2.5)


def test_projection_of_polynomial_is_exact(periodic_grid: Grid1D):
    """Five-point Gauss-Legendre integrates cubics exactly."""
    v = cell_average_project(lambda x: x**3, periodic_grid)
    faces = periodic_grid.faces
    expected = (faces[1:] ** 4 - faces[:-1] ** 4) / 4 / periodic_grid.dx
    assert_allclose(v.values, expected, rtol=1e-13)


def test_projection_splits_cells_at_jumps():
    grid = Grid1D(0.0, 1.0, 4, "extrapolate")
    v = cell_average_project(lambda x: np.where(x < 1.25, 1.0, 0.0), grid, (1.25,))
    assert_allclose(v.values, [1.0, 0.25, 0.0, 0.0], atol=1e-15)


def test_difference_quotients():
    grid = Grid1D(0.0, 0.5, 4, "periodic")
    v = GridFunction(grid, np.array([0.0, 1.0, 4.0, 9.0]))
    assert_allclose(d_plus(v).values, [2.0, 6.0, 10.0, -18.0])
    assert_allclose(d_minus(v).values, [-18.0, 2.0, 6.0, 10.0])
    assert_allclose(d_minus_d_plus(v).values, [40.0, 8.0, 8.0, -56.0])


def test_second_difference_of_constant_vanishes_on_extrapolated_edges():
    v = GridFunction(Grid1D(0.0, 0.1, 5, "extrapolate"), np.full(5, 3.0))
    assert_allclose(d_minus_d_plus(v).values, 0.0)


def test_norms():
    grid = Grid1D(0.0, 0.5, 4, "periodic")
    v = GridFunction(grid, np.array([1.0, -2.0, 0.0, 1.0]))
    assert norm_l1(v) == 2.0
    assert norm_linf(v) == 2.0
    assert bv_seminorm(v) == 3 + 2 + 1 + 0
    assert v.mass == 0.0


def test_bv_without_wrap():
    v = GridFunction(Grid1D(0.0, 1.0, 3, "extrapolate"), np.array([0.0, 1.0, 0.0]))
    assert bv_seminorm(v) == 2.0


def test_distance_requires_same_grid(profile: GridFunction):
    other = GridFunction(profile.grid.refined(1), np.zeros(64))
    with pytest.raises(PreconditionError):
        distance_l1(profile, other)


def test_refine_then_restrict_recovers(profile: GridFunction):
    fine = refine(profile, 2)
    assert fine.grid.n_cells == 4 * profile.grid.n_cells
    assert fine.mass == pytest.approx(profile.mass)
    assert_allclose(restrict(fine, profile.grid).values, profile.values)


def test_nesting(periodic_grid: Grid1D):
    assert periodic_grid.nested_in(periodic_grid.refined(3)) == 3
    assert periodic_grid.nested_in(Grid1D(0.0, 1 / 48, 48)) is None
    assert periodic_grid.nested_in(Grid1D(0.5, 1 / 64, 64)) is None


def test_restrict_rejects_unnested(profile: GridFunction):
    with pytest.raises(PreconditionError):
        restrict(profile, Grid1D(0.0, 1 / 24, 24))


def test_csv_round_trip(profile: GridFunction):
    path = Path("profile.csv")
    profile.to_csv(path)
    read = GridFunction.read_csv(path)
    assert read.grid.n_cells == profile.grid.n_cells
    assert read.grid.dx == pytest.approx(profile.grid.dx)
    assert_allclose(read.values, profile.values, rtol=0, atol=0)
