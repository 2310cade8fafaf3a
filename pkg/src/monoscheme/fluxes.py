"""Monotone two-point numerical fluxes in split form `F(u, v) = F1(u) + F2(v)`.

Piecewise-C1 splittings, such as Engquist-Osher for fluxes whose derivative changes
sign, are admissible. Their kinks are recorded in `SplitFlux.breakpoints`.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from monoscheme.exceptions import (
    FluxConstructionError,
    PreconditionError,
    QuadratureError,
)
from monoscheme.grid import sample_interval
from monoscheme.models.problem import ProblemModel, identity, one, zero
from monoscheme.quadrature import integrate
from monoscheme.types import Array, Interval, RealFn

CONSISTENCY_SAMPLES = 256
"""Samples of the value range used to check a constructed split."""
CONSISTENCY_TOL = 1e-10
"""Tolerance of the consistency checks, relative to `1 + |f(u)|`."""


@dataclass(frozen=True)
class SplitFlux:
    """Numerical flux `F(u, v) = F1(u) + F2(v)` with `F1' >= 0 >= F2'`."""

    F1: RealFn
    F2: RealFn
    F1_prime: RealFn
    F2_prime: RealFn
    name: str = ""
    breakpoints: tuple[float, ...] = ()
    """Kinks of `F1'` and `F2'`."""

    def __call__(self, u: Array, v: Array) -> Array:
        return self.F1(u) + self.F2(v)


class MonotoneReport(NamedTuple):
    """Sampled monotonicity of a split flux."""

    passed: bool
    worst_point: float
    """Sample with the largest violation, or where the margin is smallest."""
    worst_magnitude: float
    """Largest violation, zero when passing."""
    component: str
    """Which derivative is worst, `F1_prime` or `F2_prime`."""


def eval_flux(split: SplitFlux, u: float, v: float) -> float:
    """Evaluate the numerical flux at a face with left state `u` and right state `v`."""
    return float(split.F1(np.float64(u)) + split.F2(np.float64(v)))


def check_monotone(
    split: SplitFlux, value_range: Interval, n_samples: int = CONSISTENCY_SAMPLES
) -> MonotoneReport:
    """Check `F1' >= 0` and `F2' <= 0` at samples of `value_range`."""
    if n_samples < 2:  # noqa: PLR2004
        raise PreconditionError("Need at least two samples.")
    w = sample_interval(value_range, n_samples)
    increasing = -np.broadcast_to(split.F1_prime(w), w.shape)
    decreasing = np.broadcast_to(split.F2_prime(w), w.shape)
    i1, i2 = int(np.argmax(increasing)), int(np.argmax(decreasing))
    component, index, violation = (
        ("F1_prime", i1, increasing[i1])
        if increasing[i1] >= decreasing[i2]
        else ("F2_prime", i2, decreasing[i2])
    )
    return MonotoneReport(
        passed=bool(violation <= 0),
        worst_point=float(w[index]),
        worst_magnitude=float(max(violation, 0.0)),
        component=component,
    )


def validate_split(split: SplitFlux, model: ProblemModel, strict: bool = True):
    """Check consistency and derivative splitting, and monotonicity when `strict`."""
    w = sample_interval(model.value_range, CONSISTENCY_SAMPLES)
    try:
        f = np.broadcast_to(model.f(w), w.shape)
        consistency = np.abs(split.F1(w) + split.F2(w) - f)
        splitting = np.abs(
            split.F1_prime(w) + split.F2_prime(w) - np.broadcast_to(model.f_prime(w), w.shape)
        )
    except QuadratureError as exc:
        raise FluxConstructionError(f"Flux '{split.name}': {exc}") from exc
    for label, error in (("F1 + F2 = f", consistency), ("F1' + F2' = f'", splitting)):
        bound = CONSISTENCY_TOL * (1 + np.abs(f))
        if np.any(error > bound):
            i = int(np.argmax(error - bound))
            raise FluxConstructionError(
                f"Flux '{split.name}' violates {label} at u={w[i]:.17g}"
                f" by {error[i]:.3g}."
            )
    if strict:
        report = check_monotone(split, model.value_range)
        if not report.passed:
            raise FluxConstructionError(
                f"Flux '{split.name}' is not monotone: {report.component} has the wrong"
                f" sign at u={report.worst_point:.17g} by {report.worst_magnitude:.3g}."
            )


def _negate(func: RealFn) -> RealFn:
    return lambda w: -func(w)


CLOSED_FORM_EO: dict[str, SplitFlux] = {
    "zero": SplitFlux(zero, zero, zero, zero, "eo:zero"),
    "linear": SplitFlux(identity, zero, one, zero, "eo:linear"),
    "negative_linear": SplitFlux(
        zero, _negate(identity), zero, _negate(one), "eo:negative_linear"
    ),
    "burgers": SplitFlux(
        lambda u: np.maximum(u, 0) ** 2 / 2,
        lambda v: np.minimum(v, 0) ** 2 / 2,
        lambda u: np.maximum(u, 0),
        lambda v: np.minimum(v, 0),
        "eo:burgers",
        breakpoints=(0.0,),
    ),
}
"""Closed-form Engquist-Osher splittings keyed by `ProblemModel.flux_name`."""


def sign_changes(func: RealFn, interval: Interval, n_samples: int = 512) -> list[float]:
    """Points where `func` changes sign between samples of `interval`.

    A sign change across a run of zero samples yields both ends of the run.
    """
    w = sample_interval(interval, n_samples)
    values = np.broadcast_to(func(w), w.shape)
    nonzero = np.flatnonzero(values)
    roots: list[float] = []
    for i, k in zip(nonzero[:-1], nonzero[1:], strict=True):
        if values[i] * values[k] > 0:
            continue
        if k == i + 1:
            roots.append(
                float(brentq(lambda x: float(func(np.float64(x))), w[i], w[k]))  # pyright: ignore[reportArgumentType]
            )
        else:
            roots.extend((float(w[i + 1]), float(w[k - 1])))
    return sorted(set(roots))


def engquist_osher(model: ProblemModel, closed_form: bool = True) -> SplitFlux:
    """Engquist-Osher splitting from the positive and negative parts of `f'`.

    `F1(u) = f(0) + int_0^u max(f', 0)` and `F2(v) = int_0^v min(f', 0)`. Uses the
    registered closed form for `model.flux_name` unless `closed_form` is false.
    """
    if closed_form and model.flux_name in CLOSED_FORM_EO:
        split = CLOSED_FORM_EO[model.flux_name]  # pyright: ignore[reportArgumentType]
        validate_split(split, model)
        return split
    f_prime = model.f_prime
    span = (min(model.value_range[0], 0.0), max(model.value_range[1], 0.0))
    kinks = tuple(sorted({*sign_changes(f_prime, span), *model.breakpoints}))
    f0 = float(model.f(np.float64(0.0)))

    def positive_part(z: float) -> float:
        return max(float(f_prime(np.float64(z))), 0.0)

    def negative_part(z: float) -> float:
        return min(float(f_prime(np.float64(z))), 0.0)

    def F1(u: Array) -> Array:  # noqa: N802
        return f0 + _antiderivative(positive_part, u, kinks)

    def F2(v: Array) -> Array:  # noqa: N802
        return _antiderivative(negative_part, v, kinks)

    split = SplitFlux(
        F1,
        F2,
        lambda u: np.maximum(f_prime(u), 0),
        lambda v: np.minimum(f_prime(v), 0),
        f"eo:{model.key}",
        breakpoints=kinks,
    )
    validate_split(split, model)
    logger.debug(f"Built quadrature Engquist-Osher flux for '{model.key}'")
    return split


def _antiderivative(
    integrand: Callable[[float], float], x: Array, points: Sequence[float]
) -> Array:
    """Integrals of `integrand` from zero to each element of `x`."""
    x = np.asarray(x, dtype=np.float64)
    flat = [integrate(integrand, 0.0, float(xi), points) for xi in x.ravel()]
    return np.reshape(flat, x.shape)


def affine_split_flux(
    a: float, b: float, model: ProblemModel, strict: bool = True
) -> SplitFlux:
    """Affine splitting `F1(u) = a f(u) + b u`, `F2(v) = (1 - a) f(v) - b v`.

    When `strict`, requires `a f' + b >= 0` and `(1 - a) f' - b <= 0` on the value range.
    """
    f, f_prime = model.f, model.f_prime
    split = SplitFlux(
        lambda u: a * f(u) + b * u,
        lambda v: (1 - a) * f(v) - b * v,
        lambda u: a * f_prime(u) + b,
        lambda v: (1 - a) * f_prime(v) - b,
        f"ab:{a:g},{b:g}",
        breakpoints=model.breakpoints,
    )
    validate_split(split, model, strict)
    return split


def upwind_flux(model: ProblemModel) -> SplitFlux:
    """Upwind flux `F(u, v) = f(u)`, for nondecreasing `f`."""
    return affine_split_flux(1.0, 0.0, model)


def lax_friedrichs_flux(model: ProblemModel) -> SplitFlux:
    """Lax-Friedrichs flux, the affine split with `a = 1/2` and `b = sup |f'|`."""
    w = sample_interval(model.value_range, CONSISTENCY_SAMPLES)
    b = float(np.max(np.abs(np.broadcast_to(model.f_prime(w), w.shape))))
    return affine_split_flux(0.5, b, model)


def splitting_flux(
    f_plus: RealFn,
    f_minus: RealFn,
    f_plus_prime: RealFn,
    f_minus_prime: RealFn,
    model: ProblemModel,
    name: str = "splitting",
    breakpoints: tuple[float, ...] = (),
) -> SplitFlux:
    """Flux from a splitting `f = f_plus + f_minus` with `f_plus' >= 0 >= f_minus'`."""
    split = SplitFlux(f_plus, f_minus, f_plus_prime, f_minus_prime, name, breakpoints)
    validate_split(split, model)
    return split


def convex_combination(
    weights: Sequence[float], splits: Sequence[SplitFlux]
) -> SplitFlux:
    """Convex combination of split fluxes, which is again a monotone split flux."""
    if len(weights) != len(splits) or not splits:
        raise FluxConstructionError("Need one weight per flux and at least one flux.")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(w.sum() - 1) > CONSISTENCY_TOL:
        raise FluxConstructionError(f"Weights {weights} are not convex.")

    def combine(attribute: str) -> RealFn:
        funcs = [getattr(split, attribute) for split in splits]
        return lambda x: sum(
            (wi * func(x) for wi, func in zip(w, funcs, strict=True)),
            start=np.zeros_like(np.asarray(x, dtype=np.float64)),
        )

    return SplitFlux(
        combine("F1"),
        combine("F2"),
        combine("F1_prime"),
        combine("F2_prime"),
        "+".join(f"{wi:g}*{split.name}" for wi, split in zip(w, splits, strict=True)),
        tuple(sorted({p for split in splits for p in split.breakpoints})),
    )


def numerical_entropy_flux(
    split: SplitFlux,
    psi_prime: Callable[[float], float],
    c: float,
    u: float,
    v: float,
) -> float:
    """Numerical entropy flux `int_c^u psi' F1' + int_c^v psi' F2'`."""
    points = (*split.breakpoints, c)

    def left(z: float) -> float:
        return psi_prime(z) * float(split.F1_prime(np.float64(z)))

    def right(z: float) -> float:
        return psi_prime(z) * float(split.F2_prime(np.float64(z)))

    return integrate(left, c, u, points) + integrate(right, c, v, points)


def get_flux(key: str, model: ProblemModel) -> SplitFlux:
    """Build a flux from a short key: `eo`, `upwind`, `lf`, or `ab:<a>,<b>`."""
    match key.split(":", 1):
        case ["eo"]:
            return engquist_osher(model)
        case ["upwind"]:
            return upwind_flux(model)
        case ["lf"]:
            return lax_friedrichs_flux(model)
        case ["ab", params]:
            try:
                a, b = (float(p) for p in params.split(","))
            except ValueError as exc:
                raise FluxConstructionError(f"Malformed affine flux '{key}'.") from exc
            return affine_split_flux(a, b, model)
        case _:
            raise FluxConstructionError(
                f"Unknown flux '{key}'. Choose from: eo, upwind, lf, ab:<a>,<b>"
            )
