"""Problem catalog."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoscheme.exceptions import PreconditionError, UnknownKeyError
from monoscheme.models.problem import ProblemModel, identity, one, zero
from monoscheme.problems import (
    PROBLEMS,
    burgers_riemann,
    get_problem,
    porous_medium_barenblatt,
    regularize,
)
from monoscheme.quadrature import integrate
from monoscheme.types import Array

WITH_EXACT = [key for key in PROBLEMS if get_problem(key).exact is not None]


def barenblatt_mass(model: ProblemModel, t: float) -> float:
    """Integral of the exact solution over its support."""
    assert model.exact is not None
    exact = model.exact
    low, high = model.exact_breakpoints(t)
    return integrate(lambda x: float(exact(np.float64(x), t)), low, high)


def barenblatt_residual(model: ProblemModel, x: Array, t: float, h: float) -> float:
    """Largest `|u_t - A(u)_xx|` by centered differences of step `h`."""
    assert model.exact is not None
    exact = model.exact

    def a(y: Array) -> Array:
        return model.A(exact(y, t))

    u_t = (exact(x, t + h) - exact(x, t - h)) / (2 * h)
    a_xx = (a(x + h) - 2 * a(x) + a(x - h)) / h**2
    return float(np.max(np.abs(u_t - a_xx)))


@pytest.mark.parametrize("key", list(PROBLEMS))
def test_catalog_builds(key: str):
    model = get_problem(key)
    assert model.key == key
    assert float(model.A(np.float64(0.0))) == 0.0
    grid = model.grid(64)
    assert model.project(grid).grid == grid


def test_unknown_key():
    with pytest.raises(UnknownKeyError, match="Choose from") as exc_info:
        get_problem("nosuch")
    assert isinstance(exc_info.value, KeyError)


def test_shock_moves_at_rankine_hugoniot_speed(burgers: ProblemModel):
    x = np.array([0.24, 0.26])
    assert burgers.exact is not None
    assert_allclose(burgers.exact(x, 0.5), [1.0, 0.0])
    assert burgers.exact_breakpoints(0.5) == (0.25,)


def test_rarefaction_fan():
    model = get_problem("burgers_rarefaction")
    assert model.exact is not None
    assert_allclose(model.exact(np.array([-0.1, 0.25, 0.6]), 0.5), [0.0, 0.5, 1.0])


def test_riemann_needs_distinct_states():
    with pytest.raises(PreconditionError):
        burgers_riemann(1.0, 1.0)


@pytest.mark.parametrize("key", WITH_EXACT)
def test_exact_matches_initial_data(key: str):
    model = get_problem(key)
    assert model.exact is not None
    x = np.linspace(*model.domain, 256)
    assert_allclose(model.exact(x, 0.0), model.u0(x), rtol=0, atol=1e-12)


def test_heat_decay(heat: ProblemModel):
    assert heat.exact is not None
    assert heat.exact(np.array([0.25]), 0.05)[0] == pytest.approx(
        np.exp(-4 * np.pi**2 * 0.05)
    )


@pytest.mark.parametrize("m", [2, 3, 4])
def test_barenblatt_mass_is_conserved(m: int):
    model = porous_medium_barenblatt(m)
    times = (0.0, model.final_time / 2, model.final_time)
    masses = [barenblatt_mass(model, t) for t in times]
    assert_allclose(masses, masses[0], rtol=1e-8)
    assert model.project(model.grid(512)).value_range[1] == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_barenblatt_solves_the_equation(m: int):
    """Centered differences of the exact solution leave an `O(h**2)` residual."""
    model = porous_medium_barenblatt(m)
    t = model.final_time / 2
    front = model.exact_breakpoints(t)[1]
    x = np.linspace(-front / 2, front / 2, 257)
    coarse, fine = (barenblatt_residual(model, x, t, h) for h in (1e-3, 5e-4))
    assert fine < 1e-6
    assert fine <= max(coarse / 3, 1e-9)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_barenblatt_front_inside_domain(m: int):
    model = porous_medium_barenblatt(m)
    low, high = model.exact_breakpoints(model.final_time)
    assert low == -high
    assert model.domain[0] < low < 0 < high < model.domain[1]
    assert model.exact is not None
    assert model.exact(np.array([high * 1.01]), model.final_time)[0] == 0.0


def test_barenblatt_rejects_exponent():
    with pytest.raises(PreconditionError):
        porous_medium_barenblatt(5)


def test_strongly_degenerate_plateau(sd_bench: ProblemModel):
    w = np.array([-1.0, -0.5, 0.0, 0.3, 0.75])
    assert_allclose(sd_bench.A_prime(w), [1.0, 0.0, 0.0, 0.0, 0.5])
    assert_allclose(sd_bench.A(w), [-0.25, 0.0, 0.0, 0.0, 0.0625])
    assert sd_bench.exact is None
    assert not sd_bench.classical_assumptions


def test_regularize(burgers: ProblemModel):
    model = regularize(burgers, 0.25)
    assert model.key == "burgers_shock+eta=0.25"
    assert model.exact is None
    assert_allclose(model.A(np.array([1.0, 2.0])), [0.25, 0.5])
    assert_allclose(model.A_prime(np.array([1.0])), [0.25])
    with pytest.raises(PreconditionError):
        regularize(burgers, 0.0)


def test_exact_average_requires_solution(sd_bench: ProblemModel):
    with pytest.raises(PreconditionError, match="fine-grid reference"):
        sd_bench.exact_average(sd_bench.grid(16), 0.1)


def test_model_rejects_decreasing_diffusion():
    with pytest.raises(PreconditionError, match="decreasing"):
        ProblemModel(
            key="bad",
            f=zero,
            f_prime=zero,
            A=lambda w: -np.asarray(w),
            A_prime=lambda w: -one(w),
            u0=zero,
            value_range=(0.0, 1.0),
            final_time=1.0,
            domain=(0.0, 1.0),
            boundary="periodic",
        )


def test_model_rejects_inconsistent_derivative():
    with pytest.raises(PreconditionError, match="inconsistent f'"):
        ProblemModel(
            key="bad",
            f=identity,
            f_prime=lambda w: 2 * one(w),
            A=zero,
            A_prime=zero,
            u0=zero,
            value_range=(0.0, 1.0),
            final_time=1.0,
            domain=(0.0, 1.0),
            boundary="periodic",
        )


def test_model_rejects_shifted_diffusion():
    with pytest.raises(PreconditionError, match="A\\(0\\) = 0"):
        ProblemModel(
            key="bad",
            f=zero,
            f_prime=zero,
            A=lambda w: np.asarray(w) + 1,
            A_prime=one,
            u0=zero,
            value_range=(0.0, 1.0),
            final_time=1.0,
            domain=(0.0, 1.0),
            boundary="periodic",
        )
