"""Convergence rates of the implicit scheme with `dt = dx**(2/3)`."""

from monoscheme.harness import MIN_RATE, ConvergenceStudy, run_study
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.problems import get_problem
from monoscheme.stages import fine_reference, results_path
from monoscheme.stages.degenerate_rate import DX_LADDER
from monoscheme.writers import write_study

MODELS = ("heat", "sd_bench")
DT_EXPONENT = 2 / 3
"""Balances the time and space error terms of the implicit scheme."""


def main() -> list[ConvergenceStudy]:  # noqa: D103
    studies: list[ConvergenceStudy] = []
    for key in MODELS:
        reference = (
            None
            if get_problem(key).exact is not None
            else fine_reference(key, DX_LADDER[-1])
        )
        study = run_study(
            key,
            SchemeConfig(kind="implicit"),
            DX_LADDER,
            DtRule.dx_pow(DT_EXPONENT),
            reference=reference,
        )
        write_study(study, results_path(f"implicit_rate_{key}.csv"))
        studies.append(study)
    return studies


def accept(studies: list[ConvergenceStudy]) -> bool:
    """Every fitted rate reaches `MIN_RATE`."""
    return all(study.fitted_rate >= MIN_RATE for study in studies)


if __name__ == "__main__":
    main()
