"""Convergence rate of the explicit scheme on a Burgers shock."""

from monoscheme.harness import MIN_RATE, ConvergenceStudy, run_study
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.stages import results_path
from monoscheme.writers import write_study

DX_LADDER = [2.0**-k for k in range(6, 11)]


def main() -> list[ConvergenceStudy]:  # noqa: D103
    study = run_study(
        "burgers_shock", SchemeConfig(kind="explicit"), DX_LADDER, DtRule.cfl()
    )
    write_study(study, results_path("shock_rate.csv"))
    return [study]


def accept(studies: list[ConvergenceStudy]) -> bool:
    """Every pairwise rate reaches `MIN_RATE`."""
    return all(study.min_pairwise_rate >= MIN_RATE for study in studies)


if __name__ == "__main__":
    main()
