"""Model parameters for the generalized hydrodynamic system."""

from pydantic import BaseModel, ConfigDict, Field


class ModelParams(BaseModel):
    """Constants of the equation of state, transport and entropy weights.

    The heat conductivity is exposed as ``lambda`` in config files and as
    ``lam`` in Python.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    c_v: float = Field(
        default=1.5,
        gt=0,
        description="Heat capacity at constant volume"
    )
    R_gas: float = Field(
        default=1.0,
        gt=0,
        description="Gas constant"
    )
    lam: float = Field(
        default=0.01,
        gt=0,
        alias="lambda",
        description="Heat conductivity"
    )
    xi: float = Field(
        default=0.01,
        gt=0,
        description="Shear viscosity"
    )
    kappa: float = Field(
        default=0.01,
        gt=0,
        description="Bulk viscosity"
    )
    alpha1: float = Field(
        default=100.0,
        gt=0,
        description="Entropy weight of the heat variable w"
    )
    alpha2: float = Field(
        default=100.0,
        gt=0,
        description="Entropy weight of the stress variable c"
    )
    epsilon: float = Field(
        default=0.1,
        gt=0,
        description="Relaxation time"
    )
    dim: int = Field(
        default=1,
        ge=1,
        le=3,
        description="Spatial dimension"
    )

    @property
    def gamma(self) -> float:
        """Adiabatic exponent 1 + R/c_v."""
        return 1.0 + self.R_gas / self.c_v

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        """Return a validated copy with a different relaxation time."""
        return self.model_validate({**self.model_dump(), "epsilon": epsilon})

    def with_dim(self, dim: int) -> "ModelParams":
        """Return a validated copy for another spatial dimension."""
        return self.model_validate({**self.model_dump(), "dim": dim})
