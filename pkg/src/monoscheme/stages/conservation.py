"""Mass conservation on periodic grids."""

import numpy as np

from monoscheme.fluxes import engquist_osher
from monoscheme.grid import Grid1D, norm_l1
from monoscheme.models.params import SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.schemes import run_to_time
from monoscheme.stages import SEED, random_bv_profile, write_metrics
from monoscheme.types import SchemeKind

N_CELLS = 128
FINAL_TIME = 0.1
SCHEMES: tuple[SchemeKind, ...] = ("explicit", "semi", "implicit")
BOUNDS: dict[str, float] = {
    "explicit": 1e-12,
    "semi": 1e-12,
    "implicit": 50 * SchemeConfig().newton_tol,
}
"""Largest accepted relative drift by scheme."""


def main() -> dict[str, float]:
    """Largest relative mass drift over each trace, by scheme."""
    rng = np.random.default_rng(SEED)
    grid = Grid1D(0.0, 1 / N_CELLS, N_CELLS, "periodic")
    model = get_problem("sd_bench")
    split = engquist_osher(model)
    initial = random_bv_profile(rng, grid)
    scale = max(abs(initial.mass), norm_l1(initial))
    drifts: dict[str, float] = {}
    for kind in SCHEMES:
        trace = run_to_time(
            model,
            split,
            grid,
            SchemeConfig(kind=kind),
            initial=initial,
            final_time=FINAL_TIME,
        )
        drifts[kind] = max(abs(s.mass - initial.mass) for s in trace.states) / scale
    write_metrics(drifts, "conservation.csv")
    return drifts


def accept(drifts: dict[str, float]) -> bool:
    """Every drift is within its bound."""
    return all(drifts[kind] <= bound for kind, bound in BOUNDS.items())


if __name__ == "__main__":
    main()
