"""Monotone split fluxes."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from monoscheme.exceptions import FluxConstructionError, PreconditionError
from monoscheme.fluxes import (
    SplitFlux,
    affine_split_flux,
    check_monotone,
    convex_combination,
    engquist_osher,
    eval_flux,
    get_flux,
    lax_friedrichs_flux,
    numerical_entropy_flux,
    sign_changes,
    splitting_flux,
    upwind_flux,
)
from monoscheme.models.problem import ProblemModel
from monoscheme.problems import get_problem

SAMPLES = np.linspace(-1, 1, 41)


def test_burgers_eo_values(burgers_eo: SplitFlux):
    assert eval_flux(burgers_eo, 1.0, -1.0) == 1.0
    assert eval_flux(burgers_eo, -1.0, 1.0) == 0.0
    assert eval_flux(burgers_eo, 0.5, 0.5) == 0.125


def test_eo_is_consistent_and_monotone(sd_bench: ProblemModel):
    split = engquist_osher(sd_bench)
    assert_allclose(split(SAMPLES, SAMPLES), sd_bench.f(SAMPLES))
    assert check_monotone(split, sd_bench.value_range).passed


@pytest.mark.parametrize("key", ["burgers_shock", "advection", "heat"])
def test_quadrature_eo_matches_closed_form(key: str):
    model = get_problem(key)
    closed = engquist_osher(model)
    numeric = engquist_osher(model, closed_form=False)
    for attribute in ("F1", "F2", "F1_prime", "F2_prime"):
        assert_allclose(
            getattr(numeric, attribute)(SAMPLES),
            np.broadcast_to(getattr(closed, attribute)(SAMPLES), SAMPLES.shape),
            atol=1e-10,
        )


def test_quadrature_eo_records_sign_change(burgers: ProblemModel):
    assert 0.0 in engquist_osher(burgers, closed_form=False).breakpoints


def test_sign_changes():
    roots = sign_changes(lambda w: w**2 - 0.25, (-1.0, 1.0))
    assert_allclose(roots, [-0.5, 0.5])


def test_nonmonotone_affine_split_reports(burgers: ProblemModel):
    split = affine_split_flux(1.0, 0.0, burgers, strict=False)
    report = check_monotone(split, (-1.0, 1.0))
    assert not report.passed
    assert report.component == "F1_prime"
    assert report.worst_point == -1.0
    assert report.worst_magnitude == pytest.approx(1.0)


def test_strict_affine_split_refuses_nonmonotone(burgers: ProblemModel):
    with pytest.raises(FluxConstructionError, match="not monotone"):
        affine_split_flux(1.0, 0.0, get_problem("sd_bench"))
    assert affine_split_flux(0.5, 1.0, burgers).name == "ab:0.5,1"


def test_check_monotone_needs_samples(burgers_eo: SplitFlux):
    with pytest.raises(PreconditionError):
        check_monotone(burgers_eo, (0.0, 1.0), n_samples=1)


def test_inconsistent_split_refused(burgers: ProblemModel):
    def full(w):
        return np.asarray(w) ** 2 / 2

    with pytest.raises(FluxConstructionError, match="F1 \\+ F2 = f"):
        splitting_flux(full, full, lambda w: w, lambda w: w, burgers)


def test_lax_friedrichs(burgers: ProblemModel):
    split = lax_friedrichs_flux(burgers)
    u, v = np.float64(0.3), np.float64(0.9)
    expected = (burgers.f(u) + burgers.f(v)) / 2 - (v - u)
    assert split(u, v) == pytest.approx(expected)


def test_upwind_for_advection():
    model = get_problem("advection")
    split = upwind_flux(model)
    assert eval_flux(split, 0.2, 0.7) == pytest.approx(0.2)


def test_convex_combination(burgers: ProblemModel, burgers_eo: SplitFlux):
    lf = lax_friedrichs_flux(burgers)
    mixed = convex_combination([0.25, 0.75], [burgers_eo, lf])
    assert_allclose(
        mixed(SAMPLES, -SAMPLES),
        0.25 * burgers_eo(SAMPLES, -SAMPLES) + 0.75 * lf(SAMPLES, -SAMPLES),
    )
    assert check_monotone(mixed, burgers.value_range).passed


@pytest.mark.parametrize("weights", [[0.5, 0.6], [1.5, -0.5], [1.0]])
def test_convex_combination_refuses_bad_weights(burgers_eo: SplitFlux, weights):
    with pytest.raises(FluxConstructionError):
        convex_combination(weights, [burgers_eo, burgers_eo])


def test_entropy_flux_against_quadrature(burgers_eo: SplitFlux):
    """Burgers with `sign` gives `1/2 - 1/2` from `(1, -1)` about zero."""
    q = numerical_entropy_flux(burgers_eo, np.sign, 0.0, 1.0, -1.0)
    left = quad(lambda z: np.sign(z) * max(z, 0), 0, 1)[0]
    right = quad(lambda z: np.sign(z) * min(z, 0), 0, -1)[0]
    assert q == pytest.approx(left + right, abs=1e-12)
    assert q == pytest.approx(0.0, abs=1e-12)


def test_entropy_flux_off_center(burgers_eo: SplitFlux):
    q = numerical_entropy_flux(burgers_eo, np.sign, 0.25, 0.75, 0.5)
    # Only `F1` contributes for positive states
    assert q == pytest.approx((0.75**2 - 0.25**2) / 2)


@pytest.mark.parametrize(
    ("key", "name"), [("eo", "eo:burgers"), ("lf", "ab:0.5,1"), ("ab:0.5,2", "ab:0.5,2")]
)
def test_get_flux(burgers: ProblemModel, key: str, name: str):
    assert get_flux(key, burgers).name == name


@pytest.mark.parametrize("key", ["nosuch", "ab:1", "ab:x,y"])
def test_get_flux_rejects(burgers: ProblemModel, key: str):
    with pytest.raises(FluxConstructionError):
        get_flux(key, burgers)
