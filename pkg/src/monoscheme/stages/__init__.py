"""Acceptance studies, one module per property checked."""

from functools import cache
from pathlib import Path

import numpy as np
import pandas as pd

from monoscheme.fluxes import engquist_osher
from monoscheme.grid import Grid1D, GridFunction
from monoscheme.harness import reference_solution
from monoscheme.models.paths import Paths
from monoscheme.problems import get_problem
from monoscheme.writers import FLOAT_FORMAT

SEED = 0
"""Seed of the random initial profiles."""
PLATEAUS = 16
"""Constant pieces in each random profile."""


def results_path(name: str) -> Path:
    """Path to a stage artifact in the results directory."""
    return Paths().results / name


def write_metrics(metrics: dict[str, float], name: str) -> Path:
    """Write named scalar results to a two-column CSV."""
    path = results_path(name)
    pd.DataFrame({"metric": list(metrics), "value": list(metrics.values())}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return path


def random_bv_profile(rng: np.random.Generator, grid: Grid1D) -> GridFunction:
    """Piecewise-constant profile with values in `[-1, 1]` and random jump positions."""
    cuts = np.sort(rng.choice(np.arange(1, grid.n_cells), PLATEAUS - 1, replace=False))
    lengths = np.diff([0, *cuts, grid.n_cells])
    return GridFunction(grid, np.repeat(rng.uniform(-1, 1, PLATEAUS), lengths))


@cache
def fine_reference(key: str, finest_dx: float) -> GridFunction:
    """Fine-grid reference below a ladder ending at `finest_dx`, computed once per run."""
    model = get_problem(key)
    return reference_solution(model, engquist_osher(model), finest_dx)
