"""Checks of the discrete entropy structure of the schemes.

The cell entropy inequalities use the entropy pair built from the smoothed sign
`sign_eps(A(u) - A(c))`. Terms weighted by the second derivative of the entropy are
evaluated in closed form by substituting `s = A(z) - A(c)`, which is valid for any
nondecreasing `A`. Terms weighted by its first derivative are integrated numerically,
with exact antiderivatives outside the band where `|A(z) - A(c)| < eps`.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import partial
from itertools import pairwise
from typing import Literal, NamedTuple

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from monoscheme.exceptions import AuditRefusedError, PreconditionError
from monoscheme.fluxes import SplitFlux
from monoscheme.grid import (
    GridFunction,
    bv_seminorm,
    d_plus,
    distance_l1,
    norm_l1,
    norm_linf,
    pad,
    sample_interval,
)
from monoscheme.models.problem import ProblemModel, identity, one
from monoscheme.quadrature import integrate
from monoscheme.schemes import SolveTrace, face_fluxes, spatial_rhs
from monoscheme.types import Array, Interval, RealFn

RESIDUAL_TOL = 1e-8
"""Tolerance on normalized cell entropy residuals."""
STRUCTURE_SLACK = 1e-8
"""Slack allowed when comparing flux-difference norms with their initial values."""
DEFAULT_EPS_FRACTION = 1e-4
"""Default smoothing width as a fraction of the range of `A` over the value range."""
DEFAULT_CONSTANTS = 9
HOLDER_MAX_STATES = 200
"""States of a trace kept when fitting the time-Holder constant."""
HOLDER_MAX_RATIO = 1.5
EDGE_XTOL = 1e-14
CFL_SAMPLES = 512

ResidualKind = Literal["semi", "implicit", "explicit"]


@dataclass(frozen=True)
class SmoothedSign:
    """Sine-profile smoothing of `sign` over the band `|sigma| < eps`."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise PreconditionError(f"Smoothing width must be positive, got {self.eps}.")

    def sign(self, sigma: Array) -> Array:
        sigma = np.asarray(sigma, dtype=np.float64)
        inside = np.abs(sigma) < self.eps
        return np.where(inside, np.sin(np.pi * sigma / (2 * self.eps)), np.sign(sigma))

    def abs(self, sigma: Array) -> Array:
        """Antiderivative of `sign` vanishing at zero."""
        sigma = np.asarray(sigma, dtype=np.float64)
        eps = self.eps
        inside = np.abs(sigma) < eps
        return np.where(
            inside,
            2 * eps / np.pi * (1 - np.cos(np.pi * sigma / (2 * eps))),
            np.abs(sigma) - eps + 2 * eps / np.pi,
        )

    def prime(self, sigma: Array) -> Array:
        sigma = np.asarray(sigma, dtype=np.float64)
        eps = self.eps
        inside = np.abs(sigma) < eps
        return np.where(
            inside, np.pi / (2 * eps) * np.cos(np.pi * sigma / (2 * eps)), 0.0
        )


def sign_eps(sigma: Array, eps: float) -> Array:
    return SmoothedSign(eps).sign(sigma)


def abs_eps(sigma: Array, eps: float) -> Array:
    return SmoothedSign(eps).abs(sigma)


def default_eps(model: ProblemModel) -> float:
    """Smoothing width proportional to the range of `A` over the value range."""
    low, high = model.value_range
    width = float(model.A(np.float64(high)) - model.A(np.float64(low)))
    return DEFAULT_EPS_FRACTION * (width if width > 0 else 1.0)


def default_constants(model: ProblemModel, count: int = DEFAULT_CONSTANTS) -> Array:
    """Evenly spaced Kruzkov constants over the value range."""
    return sample_interval(model.value_range, count)


def smoothed_integral(
    antiderivative: RealFn,
    weight: RealFn,
    model: ProblemModel,
    c: float,
    eps: float,
    low: float,
    high: float,
    points: Sequence[float] = (),
) -> float:
    """`int_low^high sign_eps(A(z) - A(c)) weight(z) dz` where `antiderivative' = weight`."""
    if low == high:
        return 0.0
    if low > high:
        return -smoothed_integral(
            antiderivative, weight, model, c, eps, high, low, points
        )
    a_c = float(model.A(np.float64(c)))

    def s(z: float) -> float:
        return float(model.A(np.float64(z))) - a_c

    s_low, s_high = s(low), s(high)
    # The band is an interval since A is nondecreasing
    if s_low > -eps:
        band_low = low
    elif s_high <= -eps:
        band_low = high
    else:
        band_low = brentq(lambda z: s(z) + eps, low, high, xtol=EDGE_XTOL)
    if s_high < eps:
        band_high = high
    elif s_low >= eps:
        band_high = low
    else:
        band_high = brentq(lambda z: s(z) - eps, low, high, xtol=EDGE_XTOL)

    def W(z: float) -> float:  # noqa: N802
        return float(antiderivative(np.float64(z)))

    total = -(W(band_low) - W(low)) + (W(high) - W(band_high))
    if band_low < band_high:
        total += integrate(
            lambda z: float(np.sin(np.pi * s(z) / (2 * eps)))
            * float(weight(np.float64(z))),
            float(band_low),
            float(band_high),
            (*points, *model.breakpoints, c),
        )
    return total


def psi_eps(u: float, c: float, model: ProblemModel, eps: float) -> float:
    """Entropy `int_c^u sign_eps(A(z) - A(c)) dz`."""
    return smoothed_integral(identity, one, model, c, eps, c, u)


def q_eps(u: float, c: float, model: ProblemModel, eps: float) -> float:
    """Entropy flux `int_c^u sign_eps(A(z) - A(c)) f'(z) dz`."""
    return smoothed_integral(model.f, model.f_prime, model, c, eps, c, u)


def q_split(
    u: float, v: float, c: float, split: SplitFlux, model: ProblemModel, eps: float
) -> float:
    """Numerical entropy flux `Q1(u) + Q2(v)` of a split flux."""
    return smoothed_integral(
        split.F1, split.F1_prime, model, c, eps, c, u, split.breakpoints
    ) + smoothed_integral(split.F2, split.F2_prime, model, c, eps, c, v, split.breakpoints)


class ConstantResidual(NamedTuple):
    """Worst cell residual for one Kruzkov constant."""

    c: float
    worst_cell_index: int
    worst_value: float
    passed: bool


@dataclass(frozen=True)
class ResidualReport:
    """Normalized cell entropy residuals over a set of Kruzkov constants."""

    kind: ResidualKind
    constants_tested: list[float]
    worst_violation: float
    per_cell_max: Array = field(repr=False)
    tolerance_used: float
    """Bound on the normalized residuals. Each cell residual is divided by
    `1 + sum |terms|`, so the bound is relative to the size of the terms in that cell.
    """
    per_constant: list[ConstantResidual] = field(default_factory=list, repr=False)
    eps: float = 0.0

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.tolerance_used


class _CellTerms(NamedTuple):
    flux: Array
    diffusion: Array
    dissipation: Array
    """The right-hand side, always nonpositive."""


def _cell_terms(
    values: Array,
    u: GridFunction,
    split: SplitFlux,
    model: ProblemModel,
    sign: SmoothedSign,
    c: float,
) -> _CellTerms:
    """Spatial terms of the cell entropy inequality at the states `values`."""
    grid = u.grid
    dx, n = grid.dx, grid.n_cells
    p = pad(values, grid.boundary)
    integral = partial(smoothed_integral, model=model, c=c, eps=sign.eps)
    left = np.array([
        integral(split.F1, split.F1_prime, low=p[k], high=p[k + 1], points=split.breakpoints)
        for k in range(n)
    ])
    right = np.array([
        integral(split.F2, split.F2_prime, low=p[k], high=p[k + 1], points=split.breakpoints)
        for k in range(1, n + 1)
    ])
    s = np.broadcast_to(model.A(p), p.shape) - float(model.A(np.float64(c)))
    absolute = sign.abs(s)
    centre = s[1:-1]
    dissipation = -(
        _second_derivative_integral(sign, centre, s[2:])
        + _second_derivative_integral(sign, centre, s[:-2])
    ) / dx**2
    return _CellTerms(
        flux=(left + right) / dx,
        diffusion=(absolute[2:] - 2 * absolute[1:-1] + absolute[:-2]) / dx**2,
        dissipation=dissipation,
    )


def _second_derivative_integral(sign: SmoothedSign, s_a: Array, s_b: Array) -> Array:
    """`int_b^a psi''(z) (A(z) - A(b)) dz` in terms of `s = A - A(c)`, nonnegative."""
    return (s_a - s_b) * sign.sign(s_a) - sign.abs(s_a) + sign.abs(s_b)


def _report(
    kind: ResidualKind,
    constants: Sequence[float],
    residuals: list[Array],
    tolerance: float,
    eps: float,
) -> ResidualReport:
    per_constant: list[ConstantResidual] = []
    for c, residual in zip(constants, residuals, strict=True):
        worst = int(np.argmax(residual))
        value = float(residual[worst])
        per_constant.append(ConstantResidual(float(c), worst, value, value <= tolerance))
    per_cell = np.maximum(np.max(residuals, axis=0), 0.0)
    report = ResidualReport(
        kind,
        [float(c) for c in constants],
        float(per_cell.max()),
        per_cell,
        tolerance,
        per_constant,
        eps,
    )
    log = logger.info if report.passed else logger.warning
    log(
        f"{kind.capitalize()} entropy residual {report.worst_violation:.3g}"
        f" against tolerance {tolerance:.3g}"
    )
    return report


def _normalized(*terms: Array, lhs: Array, rhs: Array) -> Array:
    scale = 1 + sum(np.abs(term) for term in terms)
    return (lhs - rhs) / scale


def _defaults(
    model: ProblemModel, eps: float | None, constants: Sequence[float] | None
) -> tuple[SmoothedSign, list[float]]:
    sign = SmoothedSign(default_eps(model) if eps is None else eps)
    consts = default_constants(model) if constants is None else constants
    return sign, [float(c) for c in consts]


def semidiscrete_entropy_residual(
    u: GridFunction,
    split: SplitFlux,
    model: ProblemModel,
    eps: float | None = None,
    constants: Sequence[float] | None = None,
    tolerance: float = RESIDUAL_TOL,
) -> ResidualReport:
    """Residuals of the cell entropy inequality of the semi-discrete scheme.

    The time derivative of the entropy is `sign_eps(A(u_j) - A(c))` times the scheme's
    right-hand side.
    """
    sign, consts = _defaults(model, eps, constants)
    rate = spatial_rhs(u, split, model).values
    residuals = []
    for c in consts:
        terms = _cell_terms(u.values, u, split, model, sign, c)
        s = np.broadcast_to(model.A(u.values), u.values.shape) - float(
            model.A(np.float64(c))
        )
        time = sign.sign(s) * rate
        residuals.append(
            _normalized(
                time,
                *terms,
                lhs=time + terms.flux - terms.diffusion,
                rhs=terms.dissipation,
            )
        )
    return _report("semi", consts, residuals, tolerance, sign.eps)


def _entropy_differences(
    before: Array, after: Array, model: ProblemModel, sign: SmoothedSign, c: float
) -> Array:
    """`psi_eps(after, c) - psi_eps(before, c)` per cell."""
    return np.array([
        smoothed_integral(identity, one, model, c, sign.eps, b, a)
        for b, a in zip(before, after, strict=True)
    ])


def implicit_entropy_residual(
    u_prev: GridFunction,
    u_next: GridFunction,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    eps: float | None = None,
    constants: Sequence[float] | None = None,
    newton_tol: float = 1e-12,
) -> ResidualReport:
    """Residuals of the cell entropy inequality of the implicit scheme.

    The tolerance absorbs the Newton residual, which enters the time difference
    divided by `dt`.
    """
    _check_pair(u_prev, u_next, dt)
    sign, consts = _defaults(model, eps, constants)
    tolerance = RESIDUAL_TOL + newton_tol * (1 + norm_l1(u_prev)) / (
        u_prev.grid.dx * dt
    )
    residuals = []
    for c in consts:
        terms = _cell_terms(u_next.values, u_next, split, model, sign, c)
        time = _entropy_differences(u_prev.values, u_next.values, model, sign, c) / dt
        residuals.append(
            _normalized(
                time,
                *terms,
                lhs=time + terms.flux - terms.diffusion,
                rhs=terms.dissipation,
            )
        )
    return _report("implicit", consts, residuals, tolerance, sign.eps)


def check_conservative_cfl(
    u_range: Interval, dt: float, dx: float, split: SplitFlux
) -> float:
    """Smallest sampled `1 - dt/dx (F1' - F2')`, refusing when negative."""
    z = sample_interval(u_range, CFL_SAMPLES)
    margin = 1 - dt / dx * np.broadcast_to(split.F1_prime(z) - split.F2_prime(z), z.shape)
    worst = int(np.argmin(margin))
    if margin[worst] < 0:
        logger.warning(f"Refusing explicit entropy audit, CFL margin {margin[worst]:.3g}")
        raise AuditRefusedError(
            f"Convective CFL condition fails at u={z[worst]:.17g} with dt={dt:.6g}."
        )
    return float(margin[worst])


def explicit_entropy_residual(
    u_n: GridFunction,
    u_np1: GridFunction,
    dt: float,
    split: SplitFlux,
    model: ProblemModel,
    eps: float | None = None,
    constants: Sequence[float] | None = None,
    tolerance: float = RESIDUAL_TOL,
) -> ResidualReport:
    """Residuals of the cell entropy inequality of the explicit scheme.

    Refuses with `AuditRefusedError` unless `1 - dt/dx (F1' - F2') >= 0` over the
    states involved.
    """
    _check_pair(u_n, u_np1, dt)
    low = min(u_n.value_range[0], u_np1.value_range[0])
    high = max(u_n.value_range[1], u_np1.value_range[1])
    check_conservative_cfl((low, high), dt, u_n.grid.dx, split)
    sign, consts = _defaults(model, eps, constants)
    dx = u_n.grid.dx
    a = np.broadcast_to(model.A(u_n.values), u_n.values.shape)
    a_next = np.broadcast_to(model.A(u_np1.values), u_np1.values.shape)
    a_padded = pad(np.asarray(a), u_n.grid.boundary)
    second_difference = np.diff(a_padded, 2) / dx**2
    residuals = []
    for c in consts:
        terms = _cell_terms(u_n.values, u_n, split, model, sign, c)
        time = _entropy_differences(u_n.values, u_np1.values, model, sign, c) / dt
        a_c = float(model.A(np.float64(c)))
        extra = (sign.sign(a_next - a_c) - sign.sign(a - a_c)) * second_difference
        residuals.append(
            _normalized(
                time,
                *terms,
                extra,
                lhs=time + terms.flux - terms.diffusion,
                rhs=terms.dissipation + extra,
            )
        )
    return _report("explicit", consts, residuals, tolerance, sign.eps)


def _check_pair(before: GridFunction, after: GridFunction, dt: float):
    if before.grid != after.grid:
        raise PreconditionError("States of a step must share a grid.")
    if not dt > 0:
        raise PreconditionError(f"Time step must be positive, got {dt}.")


class EpsilonHalvingReport(NamedTuple):
    """Worst residuals as the smoothing width is halved."""

    eps_values: list[float]
    worst_violations: list[float]
    passed: bool


def epsilon_halving_check(
    residual: Callable[[float], ResidualReport], eps: float, halvings: int = 2
) -> EpsilonHalvingReport:
    """Check that residual reports stay stable at `eps`, `eps/2`, `eps/4`, ...

    Passes when each report passes and the worst violation at most doubles, up to the
    report's tolerance, from one width to the next.
    """
    eps_values = [eps / 2**k for k in range(halvings + 1)]
    reports = [residual(e) for e in eps_values]
    worst = [report.worst_violation for report in reports]
    stable = all(
        after <= 2 * before + report.tolerance_used
        for (before, after), report in zip(pairwise(worst), reports[1:], strict=True)
    )
    return EpsilonHalvingReport(
        eps_values, worst, stable and all(report.passed for report in reports)
    )


class FluxDiffReport(NamedTuple):
    """Norms of `F(u_j, u_{j+1}) - D_+ A(u_j)` along a trace."""

    sup_norms: list[float]
    bv_seminorms: list[float]
    worst_excess: float
    """Largest increase over the initial value, in either norm."""
    passed: bool


def flux_differences(
    u: GridFunction, split: SplitFlux, model: ProblemModel
) -> GridFunction:
    """`F(u_j, u_{j+1}) - D_+ A(u_j)` per cell."""
    faces = face_fluxes(u.values, u.grid.boundary, u.grid.dx, split, model)
    return u.with_values(faces[1:])


def flux_diff_audit(
    trace: SolveTrace,
    split: SplitFlux,
    model: ProblemModel,
    slack: float = STRUCTURE_SLACK,
) -> FluxDiffReport:
    """Check that the sup norm and variation of the flux differences never increase."""
    v = [flux_differences(state, split, model) for state in trace.states]
    sups = [norm_linf(vi) for vi in v]
    bvs = [bv_seminorm(vi) for vi in v]
    excess = max(
        max(s - sups[0] for s in sups), max(b - bvs[0] for b in bvs), 0.0
    )
    return FluxDiffReport(sups, bvs, excess, excess <= slack)


class HolderReport(NamedTuple):
    """Fitted constant `L` in `H(m, n) <= L sqrt(t_m - t_n)`."""

    constant: float
    n_pairs: int
    dx: float


def time_holder_audit(
    trace: SolveTrace, model: ProblemModel, max_states: int = HOLDER_MAX_STATES
) -> HolderReport:
    """Fit the time-Holder constant of `D_+ A(u)` in l1 along an explicit trace.

    `H(m, n) = dx sum_j |D_+ A(u^m_j) - D_+ A(u^n_j)|` over pairs of states from an
    evenly thinned subset of at most `max_states` saved states.
    """
    if len(trace.states) < 2:  # noqa: PLR2004
        raise PreconditionError("Time-Holder audit needs at least two saved states.")
    indices = np.unique(
        np.linspace(0, len(trace.states) - 1, min(max_states, len(trace.states))).round()
    ).astype(int)
    dx = trace.initial.grid.dx
    gradients = np.array([
        d_plus(
            state.with_values(np.broadcast_to(model.A(state.values), state.values.shape))
        ).values
        for state in (trace.states[i] for i in indices)
    ])
    times = np.asarray(trace.times)[indices]
    constant, n_pairs = 0.0, 0
    for k in range(1, len(indices)):
        h = dx * np.sum(np.abs(gradients[k] - gradients[:k]), axis=1)
        elapsed = np.sqrt(times[k] - times[:k])
        constant = max(constant, float(np.max(h / elapsed)))
        n_pairs += k
    logger.info(f"Time-Holder constant {constant:.6g} over {n_pairs} pairs")
    return HolderReport(constant, n_pairs, dx)


class HolderRefinement(NamedTuple):
    ratio: float
    """Fine-grid constant over coarse-grid constant."""
    passed: bool


def holder_refinement_check(
    coarse: HolderReport, fine: HolderReport, max_ratio: float = HOLDER_MAX_RATIO
) -> HolderRefinement:
    """Check that the time-Holder constant stays bounded under grid refinement."""
    if coarse.constant == 0:
        ratio = 0.0 if fine.constant == 0 else np.inf
    else:
        ratio = fine.constant / coarse.constant
    return HolderRefinement(ratio, ratio <= max_ratio)


class TimeLipschitzReport(NamedTuple):
    """Discrete l1 time-Lipschitz bound of an implicit trace."""

    constant: float
    """Variation of the initial flux differences."""
    worst_excess: float
    passed: bool


def l1_time_lipschitz_audit(
    trace: SolveTrace,
    split: SplitFlux,
    model: ProblemModel,
    newton_tol: float = 1e-12,
    max_states: int = HOLDER_MAX_STATES,
) -> TimeLipschitzReport:
    """Check `|u(t_n) - u(t_m)|_1 <= L |t_n - t_m|` with `L` from the initial data.

    The bound is relaxed by the Newton tolerance accumulated over the steps.
    """
    constant = bv_seminorm(flux_differences(trace.initial, split, model))
    slack = (
        2 * newton_tol * (1 + norm_l1(trace.initial)) * max(trace.step_count, 1)
        + 1e-12
    )
    indices = np.unique(
        np.linspace(0, len(trace.states) - 1, min(max_states, len(trace.states))).round()
    ).astype(int)
    worst = -np.inf
    for k, i in enumerate(indices):
        for j in indices[:k]:
            distance = distance_l1(trace.states[i], trace.states[j])
            bound = constant * abs(trace.times[i] - trace.times[j]) + slack
            worst = max(worst, distance - bound)
    worst = max(worst, 0.0)
    return TimeLipschitzReport(constant, worst, worst == 0)
