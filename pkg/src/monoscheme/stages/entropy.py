"""Cell entropy inequalities of all three schemes on catalog snapshots."""

from functools import partial

from loguru import logger

from monoscheme.audit import (
    ResidualReport,
    default_eps,
    epsilon_halving_check,
    explicit_entropy_residual,
    implicit_entropy_residual,
    semidiscrete_entropy_residual,
)
from monoscheme.fluxes import SplitFlux, engquist_osher
from monoscheme.grid import GridFunction
from monoscheme.models.params import SchemeConfig
from monoscheme.models.problem import ProblemModel
from monoscheme.problems import get_problem
from monoscheme.schemes import (
    cfl_max_dt,
    explicit_step,
    run_to_time,
    solve_implicit,
)
from monoscheme.stages import results_path, write_metrics
from monoscheme.writers import write_audit

MODELS = ("heat", "burgers_shock", "sd_bench")
N_CELLS = 128


def audit_model(key: str) -> dict[str, ResidualReport]:
    """Residual reports of each scheme for one step from the half-time snapshot."""
    model = get_problem(key)
    split = engquist_osher(model)
    grid = model.grid(N_CELLS)
    config = SchemeConfig()
    snapshot = run_to_time(
        model,
        split,
        grid,
        config,
        final_time=model.final_time / 2,
        save_every=None,
    ).final
    dt = cfl_max_dt(snapshot.value_range, split, model, grid.dx, config)
    implicit_dt = grid.dx
    return {
        "semi": semidiscrete_entropy_residual(snapshot, split, model),
        "implicit": implicit_entropy_residual(
            snapshot,
            solve_implicit(snapshot, implicit_dt, split, model, config).state,
            implicit_dt,
            split,
            model,
            newton_tol=config.newton_tol,
        ),
        "explicit": explicit_entropy_residual(
            snapshot,
            explicit_step(snapshot, dt, split, model),
            dt,
            split,
            model,
        ),
    }


def main() -> list[ResidualReport]:
    """Residual reports per model and scheme, then those of a smoothing-width check."""
    reports: list[ResidualReport] = []
    metrics: dict[str, float] = {}
    for key in MODELS:
        for kind, report in audit_model(key).items():
            write_audit(report, results_path(f"entropy_{key}_{kind}.csv"))
            metrics[f"{key}_{kind}"] = report.worst_violation
            reports.append(report)
        model = get_problem(key)
        split = engquist_osher(model)
        u = model.project(model.grid(N_CELLS))
        halved: list[ResidualReport] = []
        halving = epsilon_halving_check(
            partial(_semi_residual, u, split, model, halved), default_eps(model)
        )
        if not halving.passed:
            logger.error(
                f"Residuals of '{key}' are unstable as the smoothing width halves:"
                f" {halving.worst_violations}"
            )
        metrics[f"{key}_eps_halving"] = float(halving.passed)
        reports.extend(halved)
    write_metrics(metrics, "entropy.csv")
    return reports


def _semi_residual(
    u: GridFunction,
    split: SplitFlux,
    model: ProblemModel,
    reports: list[ResidualReport],
    eps: float,
) -> ResidualReport:
    report = semidiscrete_entropy_residual(u, split, model, eps=eps)
    reports.append(report)
    return report


def accept(reports: list[ResidualReport]) -> bool:
    """Every residual report passes."""
    return all(report.passed for report in reports)


if __name__ == "__main__":
    main()
