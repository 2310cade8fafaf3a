"""Command-line interface."""

from collections.abc import Sequence
from pathlib import Path
from typing import Literal

from cyclopts import App
from loguru import logger
from pydantic import ValidationError

from monoscheme.audit import (
    ResidualReport,
    explicit_entropy_residual,
    implicit_entropy_residual,
    semidiscrete_entropy_residual,
)
from monoscheme.exceptions import (
    FluxConstructionError,
    PreconditionError,
    QuadratureError,
    SolverError,
    StudyError,
)
from monoscheme.fluxes import get_flux
from monoscheme.grid import bv_seminorm, norm_l1, norm_linf
from monoscheme.harness import (
    RATE_GUARANTEE,
    VISCOSITY_MIN_RATE,
    ConvergenceStudy,
    l1_error,
    level_config,
    run_study,
    viscosity_rate_study,
)
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.schemes import (
    cfl_max_dt,
    default_dt,
    explicit_step,
    run_to_time,
    solve_implicit,
    trace_to_dir,
)
from monoscheme.types import SchemeKind
from monoscheme.writers import write_audit, write_study, write_viscosity_study

APP = App(help_format="markdown")
"""CLI."""

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2
EXIT_RATE = 3
EXIT_AUDIT = 4
EXIT_VISCOSITY = 5
RATE_SLACK = 0.03
"""Allowed shortfall of pairwise rates below the guaranteed rate."""
DEFAULT_ETAS = [2.0**-k for k in range(4, 10)]

DtRuleName = Literal["cfl", "dx", "dx23"]
DT_RULES: dict[str, DtRule] = {
    "cfl": DtRule.cfl(),
    "dx": DtRule.dx(),
    "dx23": DtRule.dx_pow(2 / 3),
}


def main(tokens: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    try:
        command, bound = APP.parse_args(tokens)[:2]
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        code = command(*bound.args, **bound.kwargs)
    except (PreconditionError, KeyError, FluxConstructionError, ValidationError) as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    except StudyError as exc:
        logger.error(str(exc))
        return EXIT_USAGE if isinstance(exc.cause, PreconditionError) else EXIT_SOLVER
    except (SolverError, QuadratureError) as exc:
        logger.error(str(exc))
        return EXIT_SOLVER
    return code if isinstance(code, int) else EXIT_OK


def result(**fields: object):
    """Send a summary line to `stdout`."""
    line = " ".join(
        f"{key}={value:.17g}" if isinstance(value, float) else f"{key}={value}"
        for key, value in fields.items()
    )
    print(f"RESULT {line}")  # noqa: T201


@APP.command
def solve(
    model: str,
    scheme: SchemeKind = "explicit",
    cells: int = 128,
    dt: float | None = None,
    dt_rule: DtRuleName | None = None,
    strengthened_cfl: bool = False,
    flux: str = "eo",
    out: Path = Path("trace"),
    save_every: int = 1,
) -> int:
    """Solve one problem and write the trace.

    Parameters
    ----------
    model
        Problem key.
    scheme
        Time discretization.
    cells
        Number of grid cells.
    dt
        Fixed time step, overriding `dt_rule`.
    dt_rule
        Time step rule. Defaults to the CFL bound, or `dx` for the implicit scheme.
    strengthened_cfl
        Cap the time step at `dx**(8/3)`.
    flux
        Numerical flux: `eo`, `upwind`, `lf`, or `ab:<a>,<b>`.
    out
        Directory for the manifest and state CSVs.
    save_every
        Save every this many steps.
    """
    problem = get_problem(model)
    split = get_flux(flux, problem)
    grid = problem.grid(cells)
    config = SchemeConfig(kind=scheme, strengthened_cfl=strengthened_cfl, fixed_dt=dt)
    if dt is None and dt_rule is not None:
        config = level_config(problem, split, grid, config, DT_RULES[dt_rule])
    trace = run_to_time(problem, split, grid, config, save_every=save_every)
    trace_to_dir(trace, out)
    final = trace.final
    fields: dict[str, object] = {
        "t": trace.times[-1],
        "l1": norm_l1(final),
        "linf": norm_linf(final),
        "bv": bv_seminorm(final),
        "steps": trace.step_count,
    }
    if problem.exact is not None:
        fields["l1_error"] = l1_error(final, problem, trace.times[-1])
    result(**fields)
    return EXIT_OK


def rate_exit_code(study: ConvergenceStudy) -> int:
    """Fail when a pairwise rate falls below the guaranteed rate, less a small slack."""
    if study.min_pairwise_rate >= RATE_GUARANTEE - RATE_SLACK:
        return EXIT_OK
    logger.error(
        f"Rate {study.min_pairwise_rate:.3g} below theoretical guarantee {RATE_GUARANTEE:.3g}"
    )
    return EXIT_RATE


@APP.command
def converge(
    model: str,
    scheme: SchemeKind = "explicit",
    levels: int = 4,
    coarsest_cells: int = 64,
    dt_rule: DtRuleName | None = None,
    strengthened_cfl: bool = False,
    flux: str = "eo",
    out: Path = Path("study.csv"),
    workers: int = 1,
) -> int:
    """Run a refinement study and check the observed convergence rates.

    Parameters
    ----------
    model
        Problem key.
    scheme
        Time discretization.
    levels
        Number of refinement levels, each halving the cell width.
    coarsest_cells
        Number of cells at the coarsest level.
    dt_rule
        Time step rule. Defaults to `dx23` for the implicit scheme, else `cfl`.
    strengthened_cfl
        Cap the time step at `dx**(8/3)`.
    flux
        Numerical flux: `eo`, `upwind`, `lf`, or `ab:<a>,<b>`.
    out
        Study CSV.
    workers
        Levels solved concurrently.
    """
    problem = get_problem(model)
    length = problem.domain[1] - problem.domain[0]
    ladder = [length / (coarsest_cells * 2**k) for k in range(levels)]
    rule = DT_RULES[dt_rule or ("dx23" if scheme == "implicit" else "cfl")]
    study = run_study(
        model,
        SchemeConfig(kind=scheme, strengthened_cfl=strengthened_cfl),
        ladder,
        rule,
        flux=lambda m: get_flux(flux, m),
        max_workers=workers,
        model=problem,
    )
    write_study(study, out)
    result(
        fitted_rate=study.fitted_rate,
        min_pairwise_rate=study.min_pairwise_rate,
        preasymptotic=study.preasymptotic,
    )
    return rate_exit_code(study)


@APP.command
def audit(
    model: str,
    scheme: SchemeKind = "explicit",
    cells: int = 128,
    eps: float | None = None,
    constants: int = 9,
    dt: float | None = None,
    flux: str = "eo",
    out: Path | None = None,
) -> int:
    """Check the cell entropy inequality on a snapshot at half the final time.

    Parameters
    ----------
    model
        Problem key.
    scheme
        Time discretization whose inequality is checked.
    cells
        Number of grid cells.
    eps
        Smoothing width of the sign function. Defaults to a small fraction of the
        range of `A`.
    constants
        Number of Kruzkov constants spread over the value range.
    dt
        Time step of the audited step, for the implicit and explicit schemes.
    flux
        Numerical flux: `eo`, `upwind`, `lf`, or `ab:<a>,<b>`.
    out
        Audit report CSV.
    """
    problem = get_problem(model)
    split = get_flux(flux, problem)
    grid = problem.grid(cells)
    config = SchemeConfig(kind=scheme)
    snapshot = run_to_time(
        problem, split, grid, config, final_time=problem.final_time / 2, save_every=None
    ).final
    low, high = problem.value_range
    kruzkov = [low + (high - low) * k / max(constants - 1, 1) for k in range(constants)]
    report: ResidualReport
    match scheme:
        case "semi":
            report = semidiscrete_entropy_residual(snapshot, split, problem, eps, kruzkov)
        case "implicit":
            step = dt or default_dt(snapshot, split, problem, config)
            after = solve_implicit(snapshot, step, split, problem, config).state
            report = implicit_entropy_residual(
                snapshot, after, step, split, problem, eps, kruzkov, config.newton_tol
            )
        case "explicit":
            step = dt or cfl_max_dt(
                snapshot.value_range, split, problem, grid.dx, config
            )
            after = explicit_step(snapshot, step, split, problem)
            report = explicit_entropy_residual(
                snapshot, after, step, split, problem, eps, kruzkov
            )
    if out is not None:
        write_audit(report, out)
    result(
        worst_violation=report.worst_violation,
        tolerance=report.tolerance_used,
        passed=report.passed,
    )
    return EXIT_OK if report.passed else EXIT_AUDIT


@APP.command
def viscosity(
    model: str = "burgers_shock",
    etas: list[float] | None = None,
    cells: int = 8192,
    scheme: SchemeKind = "implicit",
    out: Path = Path("viscosity.csv"),
    workers: int = 1,
) -> int:
    """Measure the rate at which vanishing-viscosity solutions converge.

    Parameters
    ----------
    model
        Problem key.
    etas
        Halving ladder of viscosities. Defaults to `2**-4` through `2**-9`.
    cells
        Number of grid cells, at most a quarter of the smallest viscosity wide.
    scheme
        Time discretization.
    out
        Study CSV.
    workers
        Viscosities solved concurrently.
    """
    problem = get_problem(model)
    study = viscosity_rate_study(
        model,
        etas or DEFAULT_ETAS,
        problem.grid(cells),
        SchemeConfig(kind=scheme),
        max_workers=workers,
    )
    write_viscosity_study(study, out)
    result(fitted_rate=study.fitted_rate, monotone=study.monotone)
    if study.fitted_rate >= VISCOSITY_MIN_RATE:
        return EXIT_OK
    logger.error(f"Viscosity rate {study.fitted_rate:.3g} below {VISCOSITY_MIN_RATE}")
    return EXIT_VISCOSITY


if __name__ == "__main__":
    raise SystemExit(main())
