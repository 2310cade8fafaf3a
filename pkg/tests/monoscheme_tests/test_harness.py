"""Refinement studies and convergence rates."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoscheme import harness
from monoscheme.exceptions import PreconditionError, StudyError
from monoscheme.fluxes import engquist_osher
from monoscheme.grid import distance_l1
from monoscheme.harness import (
    ConvergenceStudy,
    LevelResult,
    averaged_l1_error,
    check_ladder,
    estimate_rate,
    is_preasymptotic,
    level_config,
    level_grid,
    pairwise_rates,
    reference_solution,
    run_study,
    viscosity_distance,
    viscosity_rate_study,
)
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.models.problem import ProblemModel
from monoscheme.schemes import SolveTrace, cfl_max_dt

EXPLICIT = SchemeConfig(kind="explicit")


def test_pairwise_rates():
    assert_allclose(pairwise_rates([1.0, 0.5, 0.25], [1.0, 0.5, 0.25]), [1.0, 1.0])
    assert_allclose(pairwise_rates([1.0, 0.5], [1.0, 1.0]), [0.0])


def test_estimate_rate_recovers_power_law():
    hs = [2.0**-k for k in range(3, 8)]
    assert estimate_rate([(h, 3 * h**0.5) for h in hs]) == pytest.approx(0.5)


@pytest.mark.parametrize("pairs", [[(0.5, 1.0)], [(0.5, 1.0), (0.25, 0.0)]])
def test_estimate_rate_rejects(pairs):
    with pytest.raises(PreconditionError):
        estimate_rate(pairs)


@pytest.mark.parametrize(
    ("errors", "expected"),
    [([1.0, 0.5, 0.25], False), ([1.0, 0.25, 0.5], True), ([1.0, 0.5, 0.0], True)],
)
def test_is_preasymptotic(errors: list[float], expected: bool):
    assert is_preasymptotic(errors) is expected


@pytest.mark.parametrize(
    "ladder", [[0.1, 0.05], [0.1, 0.06, 0.03], [0.1, 0.05, -0.025]]
)
def test_check_ladder_rejects(ladder: list[float]):
    with pytest.raises(PreconditionError):
        check_ladder(ladder)


def test_level_grid_requires_divisor(heat: ProblemModel):
    assert level_grid(heat, 1 / 16).n_cells == 16
    with pytest.raises(PreconditionError):
        level_grid(heat, 0.3)


def test_preasymptotic_ladder_warns():
    ladder = [
        LevelResult(dx, dx, round(1 / dx), error, 1)
        for dx, error in ((0.5, 1.0), (0.25, 0.5), (0.125, 0.75))
    ]
    with pytest.warns(UserWarning, match="preasymptotic"):
        study = ConvergenceStudy.from_ladder("heat", EXPLICIT, DtRule.cfl(), ladder)
    assert study.preasymptotic
    assert study.min_pairwise_rate < 0


def test_implicit_cfl_rule_uses_explicit_bound(heat: ProblemModel):
    split = engquist_osher(heat)
    grid = heat.grid(32)
    config = level_config(
        heat, split, grid, SchemeConfig(kind="implicit"), DtRule.cfl()
    )
    assert config.fixed_dt == pytest.approx(
        cfl_max_dt((-1.0, 1.0), split, heat, grid.dx, config)
    )
    assert level_config(heat, split, grid, EXPLICIT, DtRule.cfl()).fixed_dt is None
    rule = DtRule.dx_pow(2 / 3)
    assert level_config(heat, split, grid, EXPLICIT, rule).fixed_dt == pytest.approx(
        grid.dx ** (2 / 3)
    )


def test_advection_study_converges():
    study = run_study("advection", EXPLICIT, [2.0**-k for k in range(5, 8)], DtRule.cfl())
    assert [level.n_cells for level in study.ladder] == [32, 64, 128]
    assert not study.preasymptotic
    assert study.fitted_rate > 0.8
    assert study.min_pairwise_rate > 1 / 3


def test_reference_study_without_exact_solution():
    study = run_study("sd_bench", EXPLICIT, [0.25, 0.125, 0.0625], DtRule.cfl())
    errors = [level.l1_error for level in study.ladder]
    assert all(np.isfinite(errors))
    assert all(e > 0 for e in errors)
    assert study.ladder[-1].step_count > study.ladder[0].step_count


def test_given_reference_is_used(
    monkeypatch: pytest.MonkeyPatch, sd_bench: ProblemModel
):
    ladder = [0.25, 0.125, 0.0625]
    reference = reference_solution(sd_bench, engquist_osher(sd_bench), ladder[-1])
    computed = run_study("sd_bench", EXPLICIT, ladder, DtRule.cfl())

    def fail(*args: object):
        raise AssertionError("Reference recomputed")

    monkeypatch.setattr(harness, "reference_solution", fail)
    given = run_study("sd_bench", EXPLICIT, ladder, DtRule.cfl(), reference=reference)
    assert given.ladder == computed.ladder


def test_averaged_error_uses_second_half(heat: ProblemModel):
    grid = heat.grid(32)
    times = [0.0, 0.02, 0.03, 0.05]
    exact = [heat.exact_average(grid, t) for t in times]
    stale = exact[0]
    trace = SolveTrace(times, [stale, exact[1], stale, exact[3]], 3)
    assert averaged_l1_error(trace, heat) == pytest.approx(
        distance_l1(stale, exact[2]) / 2
    )


def test_snapshot_study_keeps_steps():
    ladder = [0.25, 0.125, 0.0625]
    final = run_study("pme2", EXPLICIT, ladder, DtRule.cfl())
    averaged = run_study("pme2", EXPLICIT, ladder, DtRule.cfl(), snapshots=4)
    assert all(level.l1_error > 0 for level in averaged.ladder)
    assert [level.step_count for level in averaged.ladder] == [
        level.step_count for level in final.ladder
    ]


def test_threaded_study_matches_serial():
    ladder = [2.0**-k for k in range(4, 7)]
    serial = run_study("heat", EXPLICIT, ladder, DtRule.cfl())
    threaded = run_study("heat", EXPLICIT, ladder, DtRule.cfl(), max_workers=3)
    assert threaded.ladder == serial.ladder


def test_study_failure_names_level():
    with pytest.raises(StudyError) as exc_info:
        run_study("heat", EXPLICIT, [0.3, 0.15, 0.075], DtRule.cfl())
    assert exc_info.value.level == 0
    assert isinstance(exc_info.value.cause, PreconditionError)


def test_viscosity_distance_vanishes_without_viscosity(burgers: ProblemModel):
    assert viscosity_distance(burgers, 0.0, burgers.grid(64), EXPLICIT) == 0.0


def test_viscosity_study_requires_fine_grid(burgers: ProblemModel):
    with pytest.raises(PreconditionError, match="quarter"):
        viscosity_rate_study(
            "burgers_shock", [0.25, 0.125, 0.0625], burgers.grid(64), EXPLICIT
        )


def test_viscosity_study(burgers: ProblemModel):
    study = viscosity_rate_study(
        "burgers_shock", [0.25, 0.125, 0.0625], burgers.grid(256), EXPLICIT
    )
    assert study.monotone
    assert study.fitted_rate > 0.4
    assert len(study.pairwise_rates) == 2
