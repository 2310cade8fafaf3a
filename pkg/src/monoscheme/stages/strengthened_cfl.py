"""Convergence of the explicit scheme under the time step cap `dx**(8/3)`."""

from loguru import logger

from monoscheme.harness import MIN_RATE, ConvergenceStudy, run_study
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.stages import results_path
from monoscheme.writers import write_study

DX_LADDER = [2.0**-k for k in range(5, 8)]


def main() -> list[ConvergenceStudy]:  # noqa: D103
    study = run_study(
        "sd_bench",
        SchemeConfig(kind="explicit", strengthened_cfl=True),
        DX_LADDER,
        DtRule.cfl(),
    )
    for level in study.ladder:
        logger.info(f"dx={level.dx:.3g}: {level.step_count} steps")
    write_study(study, results_path("strengthened_cfl.csv"))
    return [study]


def accept(studies: list[ConvergenceStudy]) -> bool:
    """Every pairwise rate reaches `MIN_RATE`."""
    return all(study.min_pairwise_rate >= MIN_RATE for study in studies)


if __name__ == "__main__":
    main()
