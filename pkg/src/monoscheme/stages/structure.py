"""Structural bounds along traces: flux differences, time regularity."""

import math

from monoscheme.audit import (
    flux_diff_audit,
    holder_refinement_check,
    l1_time_lipschitz_audit,
    time_holder_audit,
)
from monoscheme.fluxes import engquist_osher
from monoscheme.models.params import SchemeConfig
from monoscheme.problems import PROBLEMS, get_problem
from monoscheme.schemes import SolveTrace, default_dt, run_to_time
from monoscheme.stages import write_metrics

FLUX_DIFF_CELLS = 128
FLUX_DIFF_TIME = 0.05
HOLDER_MODEL = "pme2"
HOLDER_CELLS = (1024, 2048)
HOLDER_TIME = 0.01
"""Final time of the pair of runs whose time-Holder constants are compared."""
SAVED_STATES = 200


def thinned_trace(
    key: str, n_cells: int, config: SchemeConfig, final_time: float
) -> SolveTrace:
    """Trace saving roughly `SAVED_STATES` states."""
    model = get_problem(key)
    split = engquist_osher(model)
    grid = model.grid(n_cells)
    steps = math.ceil(final_time / default_dt(model.project(grid), split, model, config))
    return run_to_time(
        model,
        split,
        grid,
        config,
        final_time=final_time,
        save_every=max(1, steps // SAVED_STATES),
    )


def main() -> dict[str, float]:
    """Excess of each audited quantity, pass flags, and the time-Holder ratio."""
    metrics: dict[str, float] = {}
    explicit = SchemeConfig(kind="explicit")
    implicit = SchemeConfig(kind="implicit")
    for key in PROBLEMS:
        model = get_problem(key)
        split = engquist_osher(model)
        flux_diff = flux_diff_audit(
            thinned_trace(key, FLUX_DIFF_CELLS, explicit, FLUX_DIFF_TIME), split, model
        )
        metrics[f"{key}_flux_diff_excess"] = flux_diff.worst_excess
        metrics[f"{key}_flux_diff_passed"] = float(flux_diff.passed)
        lipschitz = l1_time_lipschitz_audit(
            thinned_trace(key, FLUX_DIFF_CELLS, implicit, FLUX_DIFF_TIME),
            split,
            model,
            implicit.newton_tol,
        )
        metrics[f"{key}_lipschitz_excess"] = lipschitz.worst_excess
        metrics[f"{key}_lipschitz_passed"] = float(lipschitz.passed)
    model = get_problem(HOLDER_MODEL)
    coarse, fine = (
        time_holder_audit(thinned_trace(HOLDER_MODEL, n, explicit, HOLDER_TIME), model)
        for n in HOLDER_CELLS
    )
    holder = holder_refinement_check(coarse, fine)
    metrics["holder_coarse"] = coarse.constant
    metrics["holder_fine"] = fine.constant
    metrics["holder_ratio"] = holder.ratio
    metrics["holder_passed"] = float(holder.passed)
    write_metrics(metrics, "structure.csv")
    return metrics


def accept(metrics: dict[str, float]) -> bool:
    """Every audit passes."""
    return all(value == 1 for name, value in metrics.items() if name.endswith("_passed"))


if __name__ == "__main__":
    main()
