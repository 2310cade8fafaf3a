"""Catalog of problems with exact solutions or trusted references."""

from collections.abc import Callable
from dataclasses import replace
from functools import partial

import numpy as np

from monoscheme.exceptions import PreconditionError, UnknownKeyError
from monoscheme.models.problem import ProblemModel, identity, no_breakpoints, one, zero
from monoscheme.types import Array

RIEMANN_DOMAIN = (-2.0, 2.0)
BARENBLATT_T0 = 0.1
"""Time shift of the Barenblatt solution, so the initial data is its profile at `t0`."""
BARENBLATT_EXPONENTS = (2, 3, 4)
SD_PLATEAU = 0.5
"""Half-width of the interval where the benchmark's diffusion vanishes."""


def burgers(w: Array) -> Array:
    return np.asarray(w, dtype=np.float64) ** 2 / 2


def burgers_riemann(u_left: float, u_right: float) -> ProblemModel:
    """Burgers' equation with Riemann data jumping at the origin.

    The exact solution is a shock moving at the Rankine-Hugoniot speed when
    `u_left > u_right`, and a centered rarefaction fan otherwise.
    """
    if u_left == u_right:
        raise PreconditionError("Riemann data must have distinct states.")
    shock = u_left > u_right
    speed = (u_left + u_right) / 2

    def u0(x: Array) -> Array:
        return np.where(x < 0, u_left, u_right)

    def exact(x: Array, t: float) -> Array:
        x = np.asarray(x, dtype=np.float64)
        if t <= 0:
            return u0(x)
        if shock:
            return np.where(x < speed * t, u_left, u_right)
        return np.clip(x / t, u_left, u_right)

    def exact_breakpoints(t: float) -> tuple[float, ...]:
        if shock:
            return (speed * t,)
        return (u_left * t, u_right * t)

    key = {(1.0, 0.0): "burgers_shock", (0.0, 1.0): "burgers_rarefaction"}.get(
        (u_left, u_right), f"burgers_riemann({u_left:g},{u_right:g})"
    )
    return ProblemModel(
        key=key,
        f=burgers,
        f_prime=identity,
        A=zero,
        A_prime=zero,
        u0=u0,
        value_range=(min(u_left, u_right), max(u_left, u_right)),
        final_time=0.5,
        domain=RIEMANN_DOMAIN,
        boundary="extrapolate",
        exact=exact,
        exact_breakpoints=exact_breakpoints,
        u0_breakpoints=(0.0,),
        breakpoints=(0.0,),
        flux_name="burgers",
        # Step data is not integrable on the line, only bounded with bounded variation
        classical_assumptions=False,
        description="Burgers' equation, Riemann problem.",
    )


def heat_smooth() -> ProblemModel:
    """Heat equation with a single periodic sine mode."""

    def u0(x: Array) -> Array:
        return np.sin(2 * np.pi * x)

    def exact(x: Array, t: float) -> Array:
        return np.exp(-4 * np.pi**2 * t) * np.sin(2 * np.pi * x)

    return ProblemModel(
        key="heat",
        f=zero,
        f_prime=zero,
        A=identity,
        A_prime=one,
        u0=u0,
        value_range=(-1.0, 1.0),
        final_time=0.05,
        domain=(0.0, 1.0),
        boundary="periodic",
        exact=exact,
        flux_name="zero",
        description="Heat equation, decaying sine mode.",
    )


def linear_advection() -> ProblemModel:
    """Linear advection at unit speed of a periodic sine wave."""

    def u0(x: Array) -> Array:
        return np.sin(2 * np.pi * x)

    def exact(x: Array, t: float) -> Array:
        return np.sin(2 * np.pi * (np.asarray(x) - t))

    return ProblemModel(
        key="advection",
        f=identity,
        f_prime=one,
        A=zero,
        A_prime=zero,
        u0=u0,
        value_range=(-1.0, 1.0),
        final_time=0.5,
        domain=(0.0, 1.0),
        boundary="periodic",
        exact=exact,
        flux_name="linear",
        description="Linear advection, sine wave.",
    )


def porous_medium_barenblatt(m: int) -> ProblemModel:
    """Porous medium equation `u_t = (u**m u_x)_x` with its Barenblatt solution.

    Writes the equation as `u_t = A(u)_xx` with `A(w) = w**(m+1) / (m+1)`. The solution
    is the self-similar source solution shifted in time so that its peak is one at
    `t = 0`.
    """
    if m not in BARENBLATT_EXPONENTS:
        raise PreconditionError(
            f"Unsupported exponent m={m}. Choose from {BARENBLATT_EXPONENTS}."
        )
    p = m + 1
    alpha = 1 / (p + 1)
    k = (p - 1) / (2 * p * (p + 1))
    scale = (BARENBLATT_T0 / p) ** (alpha * m)

    def tau(t: float) -> float:
        return (t + BARENBLATT_T0) / p

    def exact(x: Array, t: float) -> Array:
        x = np.asarray(x, dtype=np.float64)
        s = tau(t)
        core = np.maximum(scale - k * x**2 * s ** (-2 * alpha), 0.0)
        return s ** (-alpha) * core ** (1 / m)

    def front(t: float) -> float:
        return float(np.sqrt(scale / k) * tau(t) ** alpha)

    def exact_breakpoints(t: float) -> tuple[float, ...]:
        return (-front(t), front(t))

    return ProblemModel(
        key=f"pme{m}",
        f=zero,
        f_prime=zero,
        A=lambda w: np.asarray(w, dtype=np.float64) ** p / p,
        A_prime=lambda w: np.asarray(w, dtype=np.float64) ** m,
        u0=partial(exact, t=0.0),
        value_range=(0.0, 1.0),
        final_time=0.5,
        domain=RIEMANN_DOMAIN,
        boundary="extrapolate",
        exact=exact,
        exact_breakpoints=exact_breakpoints,
        u0_breakpoints=exact_breakpoints(0.0),
        breakpoints=(0.0,),
        flux_name="zero",
        description=f"Porous medium equation, m={m}, Barenblatt solution.",
    )


def strongly_degenerate_benchmark() -> ProblemModel:
    """Burgers' flux with diffusion vanishing on `[-0.5, 0.5]`.

    `A'(w) = 2 (|w| - 0.5)_+`, so the equation is hyperbolic wherever `|u| <= 0.5`.
    There is no exact solution.
    """

    def excess(w: Array) -> Array:
        return np.maximum(np.abs(np.asarray(w, dtype=np.float64)) - SD_PLATEAU, 0.0)

    def u0(x: Array) -> Array:
        x = np.asarray(x, dtype=np.float64)
        return np.where(
            (x >= -SD_PLATEAU) & (x < 0),
            1.0,
            np.where((x >= 0) & (x <= SD_PLATEAU), -1.0, 0.0),
        )

    return ProblemModel(
        key="sd_bench",
        f=burgers,
        f_prime=identity,
        A=lambda w: np.sign(w) * excess(w) ** 2,
        A_prime=lambda w: 2 * excess(w),
        u0=u0,
        value_range=(-1.0, 1.0),
        final_time=0.25,
        domain=RIEMANN_DOMAIN,
        boundary="extrapolate",
        u0_breakpoints=(-SD_PLATEAU, 0.0, SD_PLATEAU),
        breakpoints=(-SD_PLATEAU, 0.0, SD_PLATEAU),
        flux_name="burgers",
        # `A(u0)` jumps, so `A(u0)_x` is a measure
        classical_assumptions=False,
        description="Strongly degenerate convection-diffusion benchmark.",
    )


def regularize(model: ProblemModel, eta: float) -> ProblemModel:
    """Viscous regularization replacing `A` by `A + eta * w`.

    The exact solution is dropped since it solves the unregularized problem.
    """
    if not eta > 0:
        raise PreconditionError(f"Viscosity must be positive, got {eta}.")
    A, A_prime = model.A, model.A_prime
    return replace(
        model,
        key=f"{model.key}+eta={eta:g}",
        A=lambda w: A(w) + eta * np.asarray(w, dtype=np.float64),
        A_prime=lambda w: A_prime(w) + eta,
        exact=None,
        exact_breakpoints=no_breakpoints,
        description=f"{model.description} Viscosity {eta:g}.".strip(),
    )


PROBLEMS: dict[str, Callable[[], ProblemModel]] = {
    "burgers_shock": partial(burgers_riemann, 1.0, 0.0),
    "burgers_rarefaction": partial(burgers_riemann, 0.0, 1.0),
    "heat": heat_smooth,
    "pme2": partial(porous_medium_barenblatt, 2),
    "pme3": partial(porous_medium_barenblatt, 3),
    "pme4": partial(porous_medium_barenblatt, 4),
    "sd_bench": strongly_degenerate_benchmark,
    "advection": linear_advection,
}
"""Problem constructors by key."""


def get_problem(key: str) -> ProblemModel:
    """Construct the problem registered under `key`."""
    try:
        return PROBLEMS[key]()
    except KeyError:
        raise UnknownKeyError("model", key, list(PROBLEMS)) from None
