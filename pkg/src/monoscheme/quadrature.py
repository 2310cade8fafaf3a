"""Adaptive quadrature."""

from collections.abc import Callable, Iterable

import numpy as np
from scipy.integrate import quad

from monoscheme.exceptions import QuadratureError

EPSABS = 1e-12
"""Absolute tolerance requested from the adaptive integrator."""
EPSREL = 1e-12
"""Relative tolerance requested from the adaptive integrator."""
LIMIT = 50
"""Maximum number of subintervals."""
ACCEPTABLE_ERROR = 1e-9
"""Largest estimated error, relative to `1 + |value|`, accepted after a warning."""


def integrate(
    func: Callable[[float], float],
    low: float,
    high: float,
    points: Iterable[float] = (),
) -> float:
    """Integrate `func` from `low` to `high`, splitting at interior `points`.

    Reversed limits flip the sign. Raises `QuadratureError` when the integrator flags
    a problem and its error estimate is not small.
    """
    if low == high:
        return 0.0
    if low > high:
        return -integrate(func, high, low, points)
    interior = sorted({float(p) for p in points if low < p < high})
    result = quad(
        func,
        low,
        high,
        full_output=1,
        epsabs=EPSABS,
        epsrel=EPSREL,
        limit=LIMIT,
        points=interior or None,
    )
    value, abserr = float(result[0]), float(result[1])
    if not np.isfinite(value):
        raise QuadratureError(low, high, abserr, "Non-finite integral.")
    # A fourth element is the integrator's warning message
    if len(result) > 3 and abserr > ACCEPTABLE_ERROR * (1 + abs(value)):
        raise QuadratureError(low, high, abserr, str(result[3]))
    return value
