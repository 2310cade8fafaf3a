"""Acceptance studies."""

from importlib import import_module

import numpy as np
import pandas as pd
import pytest

from monoscheme.grid import Grid1D
from monoscheme.harness import MIN_RATE, ConvergenceStudy, LevelResult
from monoscheme.models.params import DtRule, SchemeConfig
from monoscheme.stages import (
    PLATEAUS,
    conservation,
    random_bv_profile,
    results_path,
    shock_rate,
    stability,
    structure,
    write_metrics,
)


def study_with_errors(errors: list[float]) -> ConvergenceStudy:
    ladder = [
        LevelResult(2.0**-k, 2.0**-k, 2**k, error, 1)
        for k, error in enumerate(errors, 4)
    ]
    return ConvergenceStudy.from_ladder("heat", SchemeConfig(), DtRule.cfl(), ladder)


def test_random_profile(rng: np.random.Generator):
    profile = random_bv_profile(rng, Grid1D(0.0, 1 / 128, 128))
    assert len(np.unique(profile.values)) <= PLATEAUS
    assert np.all(np.abs(profile.values) <= 1)


def test_write_metrics():
    path = write_metrics({"a": 0.1, "b": 2.0}, "metrics.csv")
    assert path == results_path("metrics.csv")
    df = pd.read_csv(path)
    assert df["metric"].tolist() == ["a", "b"]
    assert df["value"].tolist() == [0.1, 2.0]


def test_rate_gate():
    halving = study_with_errors([0.4, 0.2, 0.1])
    assert halving.min_pairwise_rate >= MIN_RATE
    assert shock_rate.accept([halving])
    with pytest.warns(UserWarning, match="preasymptotic"):
        stalled = study_with_errors([0.4, 0.1, 0.15])
    assert not shock_rate.accept([halving, stalled])


def test_property_gates():
    assert stability.accept(dict.fromkeys(stability.BOUNDS, 0.0))
    assert not stability.accept({
        **dict.fromkeys(stability.BOUNDS, 0.0),
        "bv_increase": 1e-6,
    })
    assert not conservation.accept({"explicit": 0.0, "semi": 0.0, "implicit": 1e-6})
    assert structure.accept({"heat_flux_diff_passed": 1.0, "holder_ratio": 2.0})
    assert not structure.accept({"heat_flux_diff_passed": 1.0, "holder_passed": 0.0})


@pytest.mark.slow()
def test_stages(stage: str):
    """Run each stage and check its acceptance gate."""
    module = import_module(stage)
    assert module.accept(module.main())
    assert any(results_path("").iterdir())
