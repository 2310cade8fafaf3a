"""Test fixtures."""

from pathlib import Path
from pkgutil import iter_modules
from typing import Any

import numpy as np
import pytest

from monoscheme import stages
from monoscheme.fluxes import SplitFlux, engquist_osher
from monoscheme.grid import Grid1D, GridFunction
from monoscheme.models.problem import ProblemModel
from monoscheme.problems import get_problem
from monoscheme.stages import random_bv_profile

STAGES: list[Any] = [
    pytest.param(f"monoscheme.stages.{module.name}", id=module.name)
    for module in iter_modules(stages.__path__)
]


@pytest.fixture(autouse=True)
def _project_path(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    """Run each test in a fresh directory so artifacts land there."""
    monkeypatch.chdir(tmp_path)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture()
def periodic_grid() -> Grid1D:
    return Grid1D(0.0, 1 / 32, 32, "periodic")


@pytest.fixture()
def profile(rng: np.random.Generator, periodic_grid: Grid1D) -> GridFunction:
    """Random piecewise-constant profile on the periodic grid."""
    return random_bv_profile(rng, periodic_grid)


@pytest.fixture()
def heat() -> ProblemModel:
    return get_problem("heat")


@pytest.fixture()
def burgers() -> ProblemModel:
    return get_problem("burgers_shock")


@pytest.fixture()
def sd_bench() -> ProblemModel:
    return get_problem("sd_bench")


@pytest.fixture()
def burgers_eo(burgers: ProblemModel) -> SplitFlux:
    return engquist_osher(burgers)


@pytest.fixture(params=STAGES)
def stage(request: pytest.FixtureRequest) -> str:
    """Stage module name."""
    return request.param
