"""Rate of vanishing-viscosity convergence on a Burgers shock.

Uses the implicit scheme with `dt = dx`, since the explicit diffusive time step at this
resolution is far too small.
"""

from monoscheme.harness import (
    VISCOSITY_MIN_RATE,
    ViscosityStudy,
    viscosity_rate_study,
)
from monoscheme.models.params import SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.stages import results_path
from monoscheme.writers import write_viscosity_study

ETAS = [2.0**-k for k in range(4, 10)]
DX = 2.0**-11
MODEL = "burgers_shock"


def main() -> ViscosityStudy:  # noqa: D103
    model = get_problem(MODEL)
    n_cells = round((model.domain[1] - model.domain[0]) / DX)
    study = viscosity_rate_study(
        MODEL, ETAS, model.grid(n_cells), SchemeConfig(kind="implicit")
    )
    write_viscosity_study(study, results_path("viscosity_rate.csv"))
    return study


def accept(study: ViscosityStudy) -> bool:
    """The fitted rate in the viscosity reaches `VISCOSITY_MIN_RATE`."""
    return study.fitted_rate >= VISCOSITY_MIN_RATE


if __name__ == "__main__":
    main()
