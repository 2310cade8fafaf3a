"""Types shared across the solver, the harness, and the audits."""

from collections.abc import Callable
from typing import Literal, TypeAlias

import numpy as np
from numpy.typing import NDArray

Array: TypeAlias = NDArray[np.float64]
"""Real-valued array of cell values or samples."""
RealFn: TypeAlias = Callable[[Array], Array]
"""Vectorized real function, e.g. a flux `f` or diffusion function `A`."""
SpaceTimeFn: TypeAlias = Callable[[Array, float], Array]
"""Vectorized function of position and time, e.g. an exact solution."""
Interval: TypeAlias = tuple[float, float]
"""Closed interval `[low, high]`."""
Boundary: TypeAlias = Literal["periodic", "extrapolate"]
"""Boundary policy supplying ghost neighbors to three-point stencils."""
SchemeKind: TypeAlias = Literal["semi", "implicit", "explicit"]
"""Time discretization."""
