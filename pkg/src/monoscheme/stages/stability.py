"""Maximum principle, l1 and BV stability, and l1 contraction of the explicit scheme."""

from itertools import pairwise

import numpy as np

from monoscheme.fluxes import engquist_osher
from monoscheme.grid import Grid1D, bv_seminorm, distance_l1, norm_l1
from monoscheme.models.params import SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.schemes import SolveTrace, cfl_max_dt, run_to_time
from monoscheme.stages import SEED, random_bv_profile, write_metrics

N_PROFILES = 20
N_CELLS = 128
N_STEPS = 200
MODELS = ("burgers_shock", "heat")
BOUNDS = {
    "max_principle": 1e-12,
    "l1_increase": 1e-10,
    "bv_increase": 1e-10,
    "contraction": 1e-10,
}
"""Largest accepted violation of each property."""


def increase(values: list[float]) -> float:
    """Largest increase between successive values."""
    return max((b - a for a, b in pairwise(values)), default=0.0)


def overshoot(trace: SolveTrace) -> float:
    """Largest excursion outside the range of the initial state."""
    low, high = trace.initial.value_range
    return max(
        max(float(np.max(s.values)) - high, low - float(np.min(s.values)), 0.0)
        for s in trace.states
    )


def main() -> dict[str, float]:  # noqa: D103
    rng = np.random.default_rng(SEED)
    grid = Grid1D(0.0, 1 / N_CELLS, N_CELLS, "periodic")
    worst = dict.fromkeys(("max_principle", "l1_increase", "bv_increase", "contraction"), 0.0)
    for key in MODELS:
        model = get_problem(key)
        split = engquist_osher(model)
        dt = cfl_max_dt((-1.0, 1.0), split, model, grid.dx, SchemeConfig())
        config = SchemeConfig(fixed_dt=dt)
        traces = [
            run_to_time(
                model,
                split,
                grid,
                config,
                initial=random_bv_profile(rng, grid),
                final_time=N_STEPS * dt,
            )
            for _ in range(N_PROFILES)
        ]
        for trace in traces:
            worst["max_principle"] = max(worst["max_principle"], overshoot(trace))
            worst["l1_increase"] = max(
                worst["l1_increase"], increase([norm_l1(s) for s in trace.states])
            )
            worst["bv_increase"] = max(
                worst["bv_increase"], increase([bv_seminorm(s) for s in trace.states])
            )
        for first, second in pairwise(traces):
            initial = distance_l1(first.initial, second.initial)
            worst["contraction"] = max(
                worst["contraction"],
                *(
                    distance_l1(u, v) - initial
                    for u, v in zip(first.states, second.states, strict=True)
                ),
            )
    write_metrics(worst, "stability.csv")
    return worst


def accept(worst: dict[str, float]) -> bool:
    """Every violation is within its bound."""
    return all(worst[name] <= bound for name, bound in BOUNDS.items())


if __name__ == "__main__":
    main()
