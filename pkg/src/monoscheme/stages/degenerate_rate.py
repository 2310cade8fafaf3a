"""Convergence rates with degenerate diffusion, explicit and semi-discrete."""

from monoscheme.harness import MIN_RATE, ConvergenceStudy, run_study
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.stages import fine_reference, results_path
from monoscheme.types import SchemeKind
from monoscheme.writers import write_study

DX_LADDER = [2.0**-k for k in range(6, 10)]
MODELS = ("pme2", "sd_bench")
SCHEMES: tuple[SchemeKind, ...] = ("explicit", "semi")
SNAPSHOTS = 16
"""States averaged per level for exact-solution errors."""


def main() -> list[ConvergenceStudy]:  # noqa: D103
    studies: list[ConvergenceStudy] = []
    for key in MODELS:
        reference = (
            None
            if get_problem(key).exact is not None
            else fine_reference(key, DX_LADDER[-1])
        )
        for kind in SCHEMES:
            study = run_study(
                key,
                SchemeConfig(kind=kind),
                DX_LADDER,
                DtRule.cfl(),
                snapshots=SNAPSHOTS,
                reference=reference,
            )
            write_study(study, results_path(f"degenerate_rate_{key}_{kind}.csv"))
            studies.append(study)
    return studies


def accept(studies: list[ConvergenceStudy]) -> bool:
    """Every pairwise rate reaches `MIN_RATE`."""
    return all(study.min_pairwise_rate >= MIN_RATE for study in studies)


if __name__ == "__main__":
    main()
