"""Problem model."""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from monoscheme.exceptions import PreconditionError
from monoscheme.grid import Grid1D, GridFunction, cell_average_project, sample_interval
from monoscheme.types import Array, Boundary, Interval, RealFn, SpaceTimeFn

DERIVATIVE_SAMPLES = 64
"""Samples of the value range used to spot-check derivatives."""
DERIVATIVE_RTOL = 1e-6
"""Relative tolerance of the derivative spot-check."""
DERIVATIVE_STEP = 1e-5
"""Relative step of the centered finite differences in the spot-check."""
DIFFUSION_ORIGIN_TOL = 1e-14


def no_breakpoints(t: float) -> tuple[float, ...]:  # noqa: ARG001
    return ()


@dataclass(frozen=True)
class ProblemModel:
    """One instance of `u_t + f(u)_x = A(u)_xx` with data and domain.

    The diffusion function must satisfy `A(0) = 0` and be nondecreasing. Both `f` and
    `A` are spot-checked against their derivatives on construction.
    """

    key: str
    """Registry key."""
    f: RealFn
    """Convective flux."""
    f_prime: RealFn
    A: RealFn
    """Diffusion function."""
    A_prime: RealFn
    u0: RealFn
    """Initial data as a function of position."""
    value_range: Interval
    """Closed interval containing the range of the initial data."""
    final_time: float
    domain: Interval
    boundary: Boundary
    exact: SpaceTimeFn | None = None
    """Exact entropy solution, if known."""
    exact_breakpoints: Callable[[float], tuple[float, ...]] = no_breakpoints
    """Positions of jumps and kinks of the exact solution at a given time."""
    u0_breakpoints: tuple[float, ...] = ()
    """Positions of jumps of the initial data."""
    breakpoints: tuple[float, ...] = ()
    """Values where `f'` or `A'` has a kink or changes sign."""
    flux_name: str | None = None
    """Key of a closed-form Engquist-Osher splitting for `f`, if one exists."""
    classical_assumptions: bool = True
    """Whether the data lie classically in L1, L-infinity, and BV with `A(u0)_x` in BV."""
    description: str = field(default="", compare=False)

    def __post_init__(self):
        low, high = self.value_range
        if not low <= high:
            raise PreconditionError(f"Empty value range {self.value_range}.")
        if not self.final_time >= 0:
            raise PreconditionError(f"Final time must be nonnegative: {self.final_time}.")
        if not self.domain[0] < self.domain[1]:
            raise PreconditionError(f"Empty domain {self.domain}.")
        if abs(float(self.A(np.float64(0.0)))) > DIFFUSION_ORIGIN_TOL:
            raise PreconditionError(f"Model '{self.key}' violates A(0) = 0.")
        w = sample_interval(self.value_range, DERIVATIVE_SAMPLES)
        if np.any(self.A_prime(w) < 0):
            worst = w[np.argmin(self.A_prime(w))]
            raise PreconditionError(
                f"Model '{self.key}' has decreasing A near w={worst:.17g}."
            )
        for name, func, derivative in (
            ("f", self.f, self.f_prime),
            ("A", self.A, self.A_prime),
        ):
            check_derivative(self.key, name, func, derivative, w)

    def grid(self, n_cells: int) -> Grid1D:
        """Grid of `n_cells` cells spanning the model's domain."""
        return Grid1D.over(self.domain, n_cells, self.boundary)

    def project(self, grid: Grid1D) -> GridFunction:
        """Cell averages of the initial data."""
        return cell_average_project(self.u0, grid, self.u0_breakpoints)

    def exact_average(self, grid: Grid1D, t: float) -> GridFunction:
        """Cell averages of the exact solution at time `t`."""
        exact = self.exact
        if exact is None:
            raise PreconditionError(
                f"Model '{self.key}' has no exact solution. Use a fine-grid reference."
            )
        return cell_average_project(
            lambda x: exact(x, t), grid, self.exact_breakpoints(t)
        )


def check_derivative(key: str, name: str, func: RealFn, derivative: RealFn, w: Array):
    """Compare `derivative` with centered differences of `func` at `w`."""
    h = DERIVATIVE_STEP * (1 + np.abs(w))
    approx = (func(w + h) - func(w - h)) / (2 * h)
    expected = np.broadcast_to(derivative(w), w.shape)
    error = np.abs(approx - expected)
    bound = DERIVATIVE_RTOL * (1 + np.abs(expected))
    if np.any(error > bound):
        worst = int(np.argmax(error - bound))
        raise PreconditionError(
            f"Model '{key}' has inconsistent {name}' near w={w[worst]:.17g}"
            f" (difference quotient {approx[worst]:.17g}, derivative {expected[worst]:.17g})."
        )


def zero(w: Array) -> Array:
    return np.zeros_like(np.asarray(w, dtype=np.float64))


def one(w: Array) -> Array:
    return np.ones_like(np.asarray(w, dtype=np.float64))


def identity(w: Array) -> Array:
    return np.asarray(w, dtype=np.float64)
