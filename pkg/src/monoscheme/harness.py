"""L1 errors, refinement studies, and convergence rates."""

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple
from warnings import warn

import numpy as np
from loguru import logger

from monoscheme.exceptions import PreconditionError, StudyError
from monoscheme.fluxes import SplitFlux, engquist_osher
from monoscheme.grid import Grid1D, GridFunction, distance_l1, restrict
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.models.problem import ProblemModel
from monoscheme.problems import get_problem, regularize
from monoscheme.schemes import SolveTrace, cfl_max_dt, default_dt, run_to_time

MIN_LEVELS = 3
HALVING_RTOL = 1e-9
"""Tolerance on successive ladder entries halving."""
REFERENCE_REFINEMENT = 2
"""Fine-grid references refine the finest level `2**REFERENCE_REFINEMENT` times."""
RATE_GUARANTEE = 1 / 3
"""Proven lower bound on the L1 convergence rate."""
MIN_RATE = 0.33
"""Smallest observed rate accepted by the rate studies."""
VISCOSITY_MIN_RATE = 0.4
"""Smallest fitted rate in the viscosity accepted by viscosity studies."""

FluxFactory = Callable[[ProblemModel], SplitFlux]


class LevelResult(NamedTuple):
    """One level of a refinement study."""

    dx: float
    dt: float
    n_cells: int
    l1_error: float
    step_count: int


def pairwise_rates(hs: Sequence[float], errors: Sequence[float]) -> list[float]:
    """Observed rates between successive levels, `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`."""
    h, e = np.asarray(hs, dtype=np.float64), np.asarray(errors, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return list(np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:]))


def estimate_rate(pairs: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of `log e` against `log h`."""
    if len(pairs) < 2:  # noqa: PLR2004
        raise PreconditionError("Need at least two (h, e) pairs to estimate a rate.")
    h, e = np.asarray(pairs, dtype=np.float64).T
    if np.any(h <= 0) or np.any(e <= 0):
        raise PreconditionError(f"Rate pairs must be positive, got {pairs}.")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def is_preasymptotic(errors: Sequence[float]) -> bool:
    """Whether some error is nonpositive or the finest-level error is not the smallest."""
    e = np.asarray(errors, dtype=np.float64)
    return bool(np.any(e <= 0) or e[-1] > e.min())


@dataclass(frozen=True)
class ConvergenceStudy:
    """Errors over a ladder of halving cell widths and the observed rates."""

    model_key: str
    scheme: SchemeConfig
    dt_rule: DtRule
    ladder: list[LevelResult]
    fitted_rate: float
    pairwise_rates: list[float]
    preasymptotic: bool = False
    """Whether errors fail to decrease to the finest level."""

    @classmethod
    def from_ladder(
        cls, model_key: str, scheme: SchemeConfig, dt_rule: DtRule, ladder: list[LevelResult]
    ) -> "ConvergenceStudy":
        dxs = [level.dx for level in ladder]
        errors = [level.l1_error for level in ladder]
        preasymptotic = is_preasymptotic(errors)
        if preasymptotic:
            message = f"Study of '{model_key}' is preasymptotic, errors {errors}"
            logger.warning(message)
            warn(message, stacklevel=2)
        fitted = (
            np.nan
            if any(e <= 0 for e in errors)
            else estimate_rate(list(zip(dxs, errors, strict=True)))
        )
        return cls(
            model_key,
            scheme,
            dt_rule,
            ladder,
            fitted,
            pairwise_rates(dxs, errors),
            preasymptotic,
        )

    @property
    def min_pairwise_rate(self) -> float:
        return float(np.min(self.pairwise_rates))


def l1_error(numeric: GridFunction, model: ProblemModel, t: float) -> float:
    """L1 distance to the cell averages of the exact solution at time `t`."""
    return distance_l1(numeric, model.exact_average(numeric.grid, t))


def reference_error(numeric: GridFunction, reference: GridFunction) -> float:
    """L1 distance to a nested fine-grid reference averaged onto the coarse grid."""
    return distance_l1(numeric, restrict(reference, numeric.grid))


def check_ladder(values: Sequence[float], name: str = "dx"):
    """Require at least three entries, each half the previous."""
    if len(values) < MIN_LEVELS:
        raise PreconditionError(f"Need at least {MIN_LEVELS} levels of {name}.")
    v = np.asarray(values, dtype=np.float64)
    if np.any(v <= 0) or not np.allclose(v[1:], v[:-1] / 2, rtol=HALVING_RTOL, atol=0):
        raise PreconditionError(f"Each {name} must halve the previous, got {values}.")


def level_grid(model: ProblemModel, dx: float) -> Grid1D:
    """Grid over the model's domain with cell width `dx`."""
    length = model.domain[1] - model.domain[0]
    n_cells = round(length / dx)
    if abs(n_cells * dx - length) > HALVING_RTOL * length:
        raise PreconditionError(f"Cell width {dx} does not divide the domain {model.domain}.")
    return model.grid(n_cells)


def level_config(
    model: ProblemModel,
    split: SplitFlux,
    grid: Grid1D,
    scheme: SchemeConfig,
    dt_rule: DtRule,
) -> SchemeConfig:
    """Scheme configuration with the time step chosen by `dt_rule` on `grid`.

    The CFL rule defers to the explicit and semi-discrete defaults, and gives implicit
    runs the explicit CFL bound.
    """
    dt = dt_rule.dt_for(grid.dx)
    if dt is None and scheme.kind == "implicit":
        dt = cfl_max_dt(model.project(grid).value_range, split, model, grid.dx, scheme)
    return scheme.model_copy(update={"fixed_dt": dt})


def averaged_l1_error(trace: SolveTrace, model: ProblemModel) -> float:
    """Mean L1 error of the saved states in the second half of the run."""
    end = trace.times[-1]
    return float(
        np.mean([
            l1_error(state, model, t)
            for t, state in zip(trace.times, trace.states, strict=True)
            if t >= end / 2
        ])
    )


def solve_level(
    model: ProblemModel,
    split: SplitFlux,
    scheme: SchemeConfig,
    dt_rule: DtRule,
    dx: float,
    snapshots: int | None = None,
) -> SolveTrace:
    """Solve at one level, keeping the initial and final states.

    With `snapshots`, also keeps about that many evenly spaced states from the second
    half of the run.
    """
    grid = level_grid(model, dx)
    config = level_config(model, split, grid, scheme, dt_rule)
    save_every = None
    if snapshots:
        dt = default_dt(model.project(grid), split, model, config)
        save_every = max(1, math.floor(model.final_time / dt / (2 * snapshots)))
    return run_to_time(model, split, grid, config, save_every=save_every)


def reference_solution(
    model: ProblemModel, split: SplitFlux, finest_dx: float
) -> GridFunction:
    """Explicit solution on the finest level refined `2**REFERENCE_REFINEMENT` times."""
    dx = finest_dx / 2**REFERENCE_REFINEMENT
    logger.info(f"Computing reference for '{model.key}' at dx={dx:.3g}")
    return solve_level(model, split, SchemeConfig(kind="explicit"), DtRule.cfl(), dx).final


def _in_order(jobs: Sequence[Callable[[], object]], max_workers: int | None) -> list:
    """Run jobs, in threads when `max_workers` exceeds one, returning results in order."""
    if max_workers is None or max_workers <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(job) for job in jobs]
        return [future.result() for future in futures]


def run_study(
    model_key: str,
    scheme: SchemeConfig,
    dx_ladder: Sequence[float],
    dt_rule: DtRule,
    flux: FluxFactory = engquist_osher,
    max_workers: int | None = None,
    model: ProblemModel | None = None,
    snapshots: int | None = None,
    reference: GridFunction | None = None,
) -> ConvergenceStudy:
    """Solve at each cell width and fit the convergence rate of the L1 errors.

    Errors are taken against the exact solution when the model has one, otherwise
    against a fine-grid `reference`, computed here unless given. With `snapshots`,
    exact-solution errors are averaged over that many states from the second half of
    the run.
    """
    check_ladder(dx_ladder)
    model = model or get_problem(model_key)
    split = flux(model)
    t = model.final_time
    if model.exact is None and reference is None:
        reference = reference_solution(model, split, dx_ladder[-1])

    def level(index: int, dx: float) -> Callable[[], LevelResult]:
        def job() -> LevelResult:
            try:
                if reference is not None:
                    trace = solve_level(model, split, scheme, dt_rule, dx)
                    error = reference_error(trace.final, reference)
                elif snapshots:
                    trace = solve_level(model, split, scheme, dt_rule, dx, snapshots)
                    error = averaged_l1_error(trace, model)
                else:
                    trace = solve_level(model, split, scheme, dt_rule, dx)
                    error = l1_error(trace.final, model, t)
            except Exception as exc:
                raise StudyError(index, exc) from exc
            logger.info(f"Level {index}: dx={dx:.3g}, L1 error {error:.6g}")
            return LevelResult(
                dx,
                max(trace.dts, default=0.0),
                trace.final.grid.n_cells,
                error,
                trace.step_count,
            )

        return job

    ladder = _in_order(
        [level(i, dx) for i, dx in enumerate(dx_ladder)], max_workers
    )
    return ConvergenceStudy.from_ladder(model.key, scheme, dt_rule, ladder)


@dataclass(frozen=True)
class ViscosityStudy:
    """Distances between regularized and unregularized solutions over a ladder of `eta`."""

    model_key: str
    grid: Grid1D
    etas: list[float]
    distances: list[float]
    fitted_rate: float
    pairwise_rates: list[float] = field(default_factory=list)
    monotone: bool = True
    """Whether distances increase with `eta`."""


def viscosity_distance(
    model: ProblemModel,
    eta: float,
    grid: Grid1D,
    scheme: SchemeConfig,
    flux: FluxFactory = engquist_osher,
    unregularized: GridFunction | None = None,
) -> float:
    """L1 distance at the final time between the solutions with viscosity `eta` and zero."""
    split = flux(model)
    if unregularized is None:
        unregularized = run_to_time(model, split, grid, scheme, save_every=None).final
    if eta == 0:
        regularized = run_to_time(model, split, grid, scheme, save_every=None).final
    else:
        regularized_model = regularize(model, eta)
        regularized = run_to_time(
            regularized_model, flux(regularized_model), grid, scheme, save_every=None
        ).final
    return distance_l1(regularized, unregularized)


def viscosity_rate_study(
    model_key: str,
    eta_ladder: Sequence[float],
    grid: Grid1D,
    scheme: SchemeConfig,
    flux: FluxFactory = engquist_osher,
    max_workers: int | None = None,
) -> ViscosityStudy:
    """Fit the rate at which vanishing-viscosity solutions approach the entropy solution.

    Requires `dx <= min(eta) / 4` so that spatial error stays below the gaps in `eta`.
    """
    check_ladder(eta_ladder, "eta")
    if grid.dx > min(eta_ladder) / 4 * (1 + HALVING_RTOL):
        raise PreconditionError(
            f"Cell width {grid.dx:.3g} exceeds a quarter of the smallest viscosity."
        )
    model = get_problem(model_key)
    base = run_to_time(model, flux(model), grid, scheme, save_every=None).final

    def level(index: int, eta: float) -> Callable[[], float]:
        def job() -> float:
            try:
                distance = viscosity_distance(model, eta, grid, scheme, flux, base)
            except Exception as exc:
                raise StudyError(index, exc) from exc
            logger.info(f"Viscosity {eta:.3g}: L1 distance {distance:.6g}")
            return distance

        return job

    distances = _in_order(
        [level(i, eta) for i, eta in enumerate(eta_ladder)], max_workers
    )
    etas = list(eta_ladder)
    # Ladders run from large to small viscosity
    monotone = bool(np.all(np.diff(distances) <= 0))
    if not monotone:
        message = f"Viscosity distances for '{model_key}' are not monotone: {distances}"
        logger.warning(message)
        warn(message, stacklevel=2)
    fitted = (
        np.nan
        if any(d <= 0 for d in distances)
        else estimate_rate(list(zip(etas, distances, strict=True)))
    )
    return ViscosityStudy(
        model.key,
        grid,
        etas,
        distances,
        fitted,
        pairwise_rates(etas, distances),
        monotone,
    )
