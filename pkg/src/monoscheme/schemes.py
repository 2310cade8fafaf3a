"""Semi-discrete, implicit, and explicit monotone schemes sharing one spatial operator.

All three discretize `u_t + D_- F(u_j, u_{j+1}) = D_- D_+ A(u_j)` in space.
"""

from dataclasses import dataclass, field
from math import ceil
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.linalg import solve_banded

from monoscheme.exceptions import PreconditionError, SolverError
from monoscheme.fluxes import SplitFlux, check_monotone
from monoscheme.grid import (
    Grid1D,
    GridFunction,
    norm_l1,
    pad,
    sample_interval,
)
from monoscheme.models.params import SchemeConfig
from monoscheme.models.problem import ProblemModel
from monoscheme.types import Array, Boundary, Interval

CFL_SAMPLES = 512
"""Samples of the value range used to bound the derivatives in the CFL condition."""
STRENGTHENED_CFL_EXPONENT = 8 / 3
MIN_DT_FRACTION = 1e-14
"""Smallest admissible time step as a fraction of the final time."""
MIN_DAMPING = 2.0**-30
"""Smallest damping factor tried in the Newton line search."""
ROUNDOFF = 1e-14
"""Newton updates below this fraction of `1 + |u|_1` are at the roundoff floor."""
STEP_COUNT_SLACK = 1e-10
"""Relative slack when counting the steps needed to reach the final time."""


@dataclass(frozen=True)
class SolveTrace:
    """Saved states of a run, ending at the final time."""

    times: list[float]
    states: list[GridFunction]
    step_count: int
    dts: list[float] = field(default_factory=list, repr=False)
    """Every step size taken, in order."""
    newton_iter_histogram: dict[int, int] = field(default_factory=dict, repr=False)
    """Newton iterations per step, implicit runs only."""

    @property
    def final(self) -> GridFunction:
        return self.states[-1]

    @property
    def initial(self) -> GridFunction:
        return self.states[0]


class NewtonResult(NamedTuple):
    """Outcome of one implicit step."""

    state: GridFunction
    iterations: int
    residual: float
    """Final l1 norm of the scheme residual."""


def face_fluxes(
    values: Array, boundary: Boundary, dx: float, split: SplitFlux, model: ProblemModel
) -> Array:
    """`F(u_j, u_{j+1}) - D_+ A(u_j)` on all `n + 1` faces, ghost faces included."""
    p = pad(values, boundary)
    left, right = p[:-1], p[1:]
    return split.F1(left) + split.F2(right) - (model.A(right) - model.A(left)) / dx


def spatial_rhs(u: GridFunction, split: SplitFlux, model: ProblemModel) -> GridFunction:
    """`-D_- F(u_j, u_{j+1}) + D_- D_+ A(u_j)` per cell."""
    return u.with_values(_rhs(u.values, u.grid, split, model))


def _rhs(values: Array, grid: Grid1D, split: SplitFlux, model: ProblemModel) -> Array:
    return -np.diff(face_fluxes(values, grid.boundary, grid.dx, split, model)) / grid.dx


def cfl_max_dt(
    u_range: Interval,
    split: SplitFlux,
    model: ProblemModel,
    dx: float,
    config: SchemeConfig,
) -> float:
    """Largest stable explicit time step over states in `u_range`, times the safety.

    Requires `1 - dt/dx (F1' - F2') - 2 dt/dx**2 A' >= 0` at every sampled state.
    """
    low, high = u_range
    if not low <= high:
        raise PreconditionError(f"Empty range {u_range}.")
    z = sample_interval(u_range, CFL_SAMPLES)
    speed = np.broadcast_to(split.F1_prime(z) - split.F2_prime(z), z.shape)
    diffusion = np.broadcast_to(model.A_prime(z), z.shape)
    for name, samples in (("F1' - F2'", speed), ("A'", diffusion)):
        bad = ~np.isfinite(samples) | (samples < 0)
        if np.any(bad):
            raise PreconditionError(
                f"CFL bound needs finite nonnegative {name}, got {samples[bad][0]:.3g}"
                f" at u={z[bad][0]:.17g}."
            )
    sup_speed, sup_diffusion = float(speed.max()), float(diffusion.max())
    if sup_speed == 0 and sup_diffusion == 0:
        dt = model.final_time if model.final_time > 0 else np.inf
    else:
        dt = config.cfl_safety * dx**2 / (dx * sup_speed + 2 * sup_diffusion)
    if config.strengthened_cfl:
        dt = min(dt, dx**STRENGTHENED_CFL_EXPONENT)
    return dt


def explicit_step(
    u: GridFunction, dt: float, split: SplitFlux, model: ProblemModel
) -> GridFunction:
    """Forward Euler step `u + dt * spatial_rhs(u)`."""
    return u.with_values(u.values + dt * _rhs(u.values, u.grid, split, model))


def ssp_rk3_step(
    u: GridFunction, dt: float, split: SplitFlux, model: ProblemModel
) -> GridFunction:
    """Strong-stability-preserving third-order Runge-Kutta step."""
    grid = u.grid

    def euler(values: Array) -> Array:
        return values + dt * _rhs(values, grid, split, model)

    u0 = u.values
    u1 = euler(u0)
    u2 = 3 / 4 * u0 + 1 / 4 * euler(u1)
    return u.with_values(1 / 3 * u0 + 2 / 3 * euler(u2))


def solve_tridiagonal(
    lower: Array, diag: Array, upper: Array, rhs: Array, periodic: bool
) -> Array:
    """Solve a tridiagonal system, with corner entries when `periodic`.

    Row `j` reads `lower[j] x[j-1] + diag[j] x[j] + upper[j] x[j+1] = rhs[j]`, indices
    taken cyclically when `periodic`. Cyclic systems are reduced to two banded solves
    by the Sherman-Morrison formula.
    """
    if not periodic:
        return _solve_banded(lower, diag, upper, rhs)
    bottom_left, top_right = upper[-1], lower[0]
    gamma = -diag[0]
    modified = diag.copy()
    modified[0] -= gamma
    modified[-1] -= bottom_left * top_right / gamma
    x = _solve_banded(lower, modified, upper, rhs)
    correction = np.zeros_like(rhs)
    correction[0], correction[-1] = gamma, bottom_left
    z = _solve_banded(lower, modified, upper, correction)
    factor = (x[0] + top_right * x[-1] / gamma) / (
        1 + z[0] + top_right * z[-1] / gamma
    )
    return x - factor * z


def _solve_banded(lower: Array, diag: Array, upper: Array, rhs: Array) -> Array:
    ab = np.zeros((3, len(diag)))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs)


def _jacobian(
    values: Array,
    boundary: Boundary,
    dx: float,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
) -> tuple[Array, Array, Array]:
    """Bands of the Jacobian of the implicit residual."""
    p = pad(values, boundary)
    shape = p.shape
    f1 = np.broadcast_to(split.F1_prime(p), shape)
    f2 = np.broadcast_to(split.F2_prime(p), shape)
    a = np.broadcast_to(model.A_prime(p), shape)
    diag = 1 + dt * ((f1[1:-1] - f2[1:-1]) / dx + 2 * a[1:-1] / dx**2)
    upper = dt * (f2[2:] / dx - a[2:] / dx**2)
    lower = dt * (-f1[:-2] / dx - a[:-2] / dx**2)
    if boundary == "extrapolate":
        # Ghost cells copy the edge cells
        diag[0] += lower[0]
        diag[-1] += upper[-1]
        lower[0] = upper[-1] = 0.0
    return lower, diag, upper


def solve_implicit(
    u_prev: GridFunction,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    config: SchemeConfig,
) -> NewtonResult:
    """Backward Euler step by damped Newton iteration, continued in the time step.

    Newton first tries the full step from `u_prev`. When that fails, the step is
    reached through intermediate steps `tau`, each solved from the solution at the
    previous `tau`. Increments of `tau` halve after a failure and double after a
    success, and the step fails once they drop below `dt * 2**-max_halvings`.
    Converged when the l1 norm of the scheme residual is at most
    `newton_tol * (1 + |u_prev|_1)`.
    """
    if not dt > 0:
        raise PreconditionError(f"Time step must be positive, got {dt}.")
    try:
        return _newton(u_prev, u_prev.values, dt, split, model, config)
    except SolverError as exc:
        failure = exc
    logger.debug(f"Continuing implicit step of {dt:.3g} from smaller steps")
    smallest = dt * 2.0**-config.max_halvings
    tau, guess, increment, iterations = 0.0, u_prev.values, dt / 2, 0
    while True:
        if increment < smallest:
            raise failure
        target = dt if tau + increment >= dt * (1 - STEP_COUNT_SLACK) else tau + increment
        try:
            result = _newton(u_prev, guess, target, split, model, config)
        except SolverError:
            increment /= 2
            continue
        iterations += result.iterations
        if target == dt:
            return result._replace(iterations=iterations)
        tau, guess, increment = target, result.state.values, 2 * increment


def _newton(
    u_prev: GridFunction,
    guess: Array,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    config: SchemeConfig,
) -> NewtonResult:
    """Damped Newton iteration for one backward Euler step, starting from `guess`."""
    grid = u_prev.grid
    dx, boundary = grid.dx, grid.boundary
    prev = u_prev.values

    def residual(values: Array) -> Array:
        return values - prev - dt * _rhs(values, grid, split, model)

    def l1(values: Array) -> float:
        return dx * float(np.sum(np.abs(values)))

    tol = config.newton_tol * (1 + norm_l1(u_prev))
    u = guess.copy()
    r = residual(u)
    norm = l1(r)
    for iteration in range(config.newton_max_iters + 1):
        if norm <= tol:
            return NewtonResult(u_prev.with_values(u), iteration, norm)
        if iteration == config.newton_max_iters:
            break
        lower, diag, upper = _jacobian(u, boundary, dx, dt, split, model)
        delta = solve_tridiagonal(lower, diag, upper, -r, boundary == "periodic")
        damping = 1.0
        while True:
            trial = u + damping * delta
            r_trial = residual(trial)
            norm_trial = l1(r_trial)
            if np.isfinite(norm_trial) and norm_trial < norm:
                break
            damping /= 2
            if damping < MIN_DAMPING:
                if l1(delta) <= ROUNDOFF * (1 + l1(u)):
                    logger.debug(f"Newton stopped at roundoff, residual {norm:.3g}")
                    return NewtonResult(u_prev.with_values(u), iteration, norm)
                raise SolverError(
                    f"Newton line search failed to reduce the residual {norm:.3g}"
                )
        u, r, norm = trial, r_trial, norm_trial
    raise SolverError(
        f"Newton did not converge in {config.newton_max_iters} iterations,"
        f" residual {norm:.3g} above {tol:.3g}"
    )


def implicit_step(
    u_prev: GridFunction,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    config: SchemeConfig,
) -> GridFunction:
    """Backward Euler step, see `solve_implicit`."""
    return solve_implicit(u_prev, dt, split, model, config).state


def _implicit_advance(
    u: GridFunction,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    config: SchemeConfig,
    depth: int = 0,
) -> tuple[GridFunction, int]:
    """Implicit step, retried as two half steps after a Newton failure."""
    try:
        result = solve_implicit(u, dt, split, model, config)
    except SolverError:
        if depth >= config.max_halvings:
            raise
        logger.debug(f"Halving implicit step to {dt / 2:.3g}")
        half, first = _implicit_advance(u, dt / 2, split, model, config, depth + 1)
        full, second = _implicit_advance(half, dt / 2, split, model, config, depth + 1)
        return full, first + second
    return result.state, result.iterations


def _step_times(final_time: float, dt: float) -> list[float]:
    """Times of the steps, the last one clipped to end at `final_time`."""
    if final_time <= 0:
        return [0.0]
    n_steps = max(1, ceil(final_time / dt * (1 - STEP_COUNT_SLACK)))
    return [k * dt for k in range(n_steps)] + [final_time]


def default_dt(
    initial: GridFunction, split: SplitFlux, model: ProblemModel, config: SchemeConfig
) -> float:
    """Time step used by `run_to_time` for `config`."""
    if config.fixed_dt is not None:
        return config.fixed_dt
    dx = initial.grid.dx
    match config.kind:
        case "implicit":
            return dx
        case "explicit":
            return cfl_max_dt(initial.value_range, split, model, dx, config)
        case "semi":
            return config.rk_substep_factor * cfl_max_dt(
                initial.value_range, split, model, dx, config
            )


def run_to_time(
    model: ProblemModel,
    split: SplitFlux,
    grid: Grid1D,
    config: SchemeConfig,
    initial: GridFunction | None = None,
    final_time: float | None = None,
    save_every: int | None = 1,
) -> SolveTrace:
    """Advance the projected initial data, or `initial`, to the final time.

    The time step is computed once, from the range of the initial state, which bounds
    every later range by the maximum principle. Saves every `save_every`-th state,
    or only the initial and final states when `save_every` is `None`.
    """
    if save_every is not None and save_every < 1:
        raise PreconditionError(f"Save interval must be positive, got {save_every}.")
    u = model.project(grid) if initial is None else initial
    final_time = model.final_time if final_time is None else final_time
    if config.kind != "implicit":
        _check_monotone(u, split, config)
    dt = default_dt(u, split, model, config)
    if config.kind == "explicit":
        _check_cfl(u, dt, split, model, config)
    if config.kind == "semi" and dt < MIN_DT_FRACTION * final_time:
        raise SolverError("Time step degenerated", step=0, time=0.0)
    times = _step_times(final_time, dt)
    logger.info(
        f"Solving '{model.key}' with {config.kind} scheme on {grid.n_cells} cells,"
        f" {len(times) - 1} steps of {dt:.3g}"
    )
    saved_times, states = [0.0], [u]
    dts: list[float] = []
    histogram: dict[int, int] = {}
    last = len(times) - 1
    for step, (t, t_next) in enumerate(zip(times[:-1], times[1:], strict=True), 1):
        h = t_next - t
        try:
            match config.kind:
                case "explicit":
                    u = explicit_step(u, h, split, model)
                case "semi":
                    u = ssp_rk3_step(u, h, split, model)
                case "implicit":
                    u, histogram[step] = _implicit_advance(u, h, split, model, config)
        except SolverError as exc:
            raise SolverError(exc.message, step=step, time=t) from exc
        except PreconditionError as exc:
            # Non-finite states
            raise SolverError(str(exc), step=step, time=t) from exc
        dts.append(h)
        if (save_every and step % save_every == 0) or step == last:
            saved_times.append(t_next)
            states.append(u)
    logger.info(f"Reached t={final_time:.6g} after {last} steps")
    return SolveTrace(saved_times, states, last, dts, histogram)


def _check_monotone(u: GridFunction, split: SplitFlux, config: SchemeConfig):
    """Refuse fluxes that are not monotone over the range of `u`."""
    report = check_monotone(split, u.value_range)
    if not report.passed:
        raise PreconditionError(
            f"The {config.kind} scheme needs a monotone flux, '{split.name}' fails at"
            f" u={report.worst_point:.17g}."
        )


def _check_cfl(
    u: GridFunction, dt: float, split: SplitFlux, model: ProblemModel, config: SchemeConfig
):
    """Refuse explicit time steps beyond the CFL bound."""
    bound = cfl_max_dt(
        u.value_range,
        split,
        model,
        u.grid.dx,
        config.model_copy(update={"cfl_safety": 1.0, "strengthened_cfl": False}),
    )
    if dt > bound * (1 + STEP_COUNT_SLACK):
        logger.warning(f"Refusing explicit time step {dt:.3g} above CFL bound {bound:.3g}")
        raise PreconditionError(
            f"Explicit time step {dt:.6g} exceeds the CFL bound {bound:.6g}."
        )


def semi_discrete_solve(
    model: ProblemModel,
    split: SplitFlux,
    grid: Grid1D,
    config: SchemeConfig,
    initial: GridFunction | None = None,
    save_every: int | None = 1,
) -> SolveTrace:
    """Integrate the semi-discrete scheme with SSP-RK3."""
    return run_to_time(
        model,
        split,
        grid,
        config.model_copy(update={"kind": "semi"}),
        initial=initial,
        save_every=save_every,
    )


def trace_to_dir(trace: SolveTrace, out: Path) -> Path:
    """Write each saved state to CSV and a manifest of times and files."""
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    for index, (t, state) in enumerate(zip(trace.times, trace.states, strict=True)):
        name = f"state_{index:05d}_t{t:.17g}.csv"
        state.to_csv(out / name)
        files.append(name)
    manifest = out / "manifest.csv"
    pd.DataFrame({"t": trace.times, "file": files}).to_csv(
        manifest, index_label="index", float_format="%.17g", lineterminator="\n"
    )
    return manifest
