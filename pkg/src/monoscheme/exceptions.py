"""Exceptions."""


class MonoschemeError(Exception):
    """Base for all errors raised by this package."""


class PreconditionError(MonoschemeError, ValueError):
    """An input violates the precondition of an operation."""


class UnknownKeyError(MonoschemeError, KeyError):
    """A model or flux key is not registered."""

    def __init__(self, kind: str, key: str, known: list[str]):
        super().__init__(key)
        self.kind = kind
        self.key = key
        self.known = known

    def __str__(self):
        return f"Unknown {self.kind} '{self.key}'. Choose from: {', '.join(self.known)}"


class QuadratureError(MonoschemeError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, low: float, high: float, abserr: float, message: str = ""):
        super().__init__()
        self.low = low
        self.high = high
        self.abserr = abserr
        self.message = message

    def __str__(self):
        return (
            f"Quadrature on [{self.low:.17g}, {self.high:.17g}] did not converge"
            f" (estimated error {self.abserr:.3g}). {self.message}".strip()
        )


class FluxConstructionError(MonoschemeError):
    """A split flux could not be built or fails its admissibility checks."""


class SolverError(MonoschemeError):
    """A time step failed."""

    def __init__(self, message: str, step: int = -1, time: float = float("nan")):
        super().__init__(message)
        self.message = message
        self.step = step
        self.time = time

    def __str__(self):
        return f"Step {self.step} at t={self.time:.17g}: {self.message}"


class AuditRefusedError(PreconditionError):
    """The hypothesis of an audited inequality does not hold, so it is not evaluated."""


class StudyError(MonoschemeError):
    """A refinement level failed."""

    def __init__(self, level: int, cause: Exception):
        super().__init__(str(cause))
        self.level = level
        self.cause = cause

    def __str__(self):
        return f"Level {self.level} failed: {self.cause}"
