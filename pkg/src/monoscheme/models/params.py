"""Scheme and study parameters."""

import sys
from typing import Literal

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from monoscheme.types import SchemeKind


class SchemeConfig(BaseModel):
    """Time discretization and its controls."""

    model_config = ConfigDict(frozen=True)

    kind: SchemeKind = Field(default="explicit", description="Time discretization.")
    cfl_safety: float = Field(
        default=0.9, gt=0, le=1, description="Fraction of the CFL time step to take."
    )
    strengthened_cfl: bool = Field(
        default=False, description="Additionally cap the time step at `dx**(8/3)`."
    )
    newton_tol: float = Field(
        default=1e-12,
        gt=0,
        description="Newton tolerance on the l1 residual, relative to `1 + |u_prev|_1`.",
    )
    newton_max_iters: int = Field(
        default=50, ge=1, description="Newton iterations allowed per implicit step."
    )
    rk_substep_factor: float = Field(
        default=0.25,
        gt=0,
        le=1,
        description="Fraction of the CFL time step used by the semi-discrete integrator.",
    )
    fixed_dt: float | None = Field(
        default=None, gt=0, description="Time step overriding the default rule."
    )
    max_halvings: int = Field(
        default=10,
        ge=0,
        description=(
            "Times an implicit step, or an increment of its continuation in the time"
            " step, may be halved after a Newton failure."
        ),
    )


class DtRule(BaseModel):
    """How a refinement study chooses the time step at each level."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["cfl", "dx", "dx_pow", "fixed"] = Field(
        default="cfl", description="Time step rule."
    )
    value: float | None = Field(
        default=None, gt=0, description="Exponent for `dx_pow`, time step for `fixed`."
    )

    @model_validator(mode="after")
    def validate_value(self) -> Self:
        """Require a value exactly for the rules that take one."""
        needs_value = self.kind in ("dx_pow", "fixed")
        if needs_value and self.value is None:
            raise ValueError(f"Time step rule '{self.kind}' needs a value.")
        if not needs_value and self.value is not None:
            raise ValueError(f"Time step rule '{self.kind}' takes no value.")
        return self

    @classmethod
    def cfl(cls) -> Self:
        return cls(kind="cfl")

    @classmethod
    def dx(cls) -> Self:
        return cls(kind="dx")

    @classmethod
    def dx_pow(cls, p: float) -> Self:
        return cls(kind="dx_pow", value=p)

    @classmethod
    def fixed(cls, v: float) -> Self:
        return cls(kind="fixed", value=v)

    def dt_for(self, dx: float) -> float | None:
        """Time step at cell width `dx`, or `None` to defer to the CFL bound."""
        match self.kind:
            case "cfl":
                return None
            case "dx":
                return dx
            case "dx_pow":
                return dx ** self.value  # pyright: ignore[reportOptionalOperand]
            case "fixed":
                return self.value
