"""Well-prepared initial data for the relaxation runs."""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from ..models.params import ModelParams
from ..models.state import NormalState
from ..solvers.grid import Field, NsfField, ddx
from ..solvers.nsf import dv_tensor, euler_primitives
from ..system.normal_form import from_normal

logger = logging.getLogger(__name__)


class PreparedData(BaseModel):
    """Generalized initial field built from a Navier-Stokes-Fourier snapshot."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    field: Field
    epsilon: float = PydanticField(gt=0)
    v_ii: np.ndarray = PydanticField(description="Dissipative normal variables (N, 2)")
    well_prepared: bool = True

    @property
    def v_ii_max(self) -> float:
        """Largest |V^II| over the grid."""
        return float(np.max(np.abs(self.v_ii))) if self.v_ii.size else 0.0


def closure_variables(nsf: NsfField, epsilon: float, params: ModelParams) -> np.ndarray:
    """V^II = eps (lambda T_x, D[v]/T), the first Maxwell-iteration values.

    These equal (-q, -tau/theta) for q = -eps lambda T_x and tau = -eps D[v].
    """
    _, v, _, temperature, _ = euler_primitives(nsf.U, params)
    dx = nsf.grid.dx
    return np.stack([
        epsilon * params.lam * ddx(temperature, dx),
        epsilon * dv_tensor(v, dx, params) / temperature,
    ], axis=-1)


def prepare(
    nsf: NsfField,
    epsilon: float,
    params: ModelParams,
    well_prepared: bool = True,
) -> PreparedData:
    """Initial field whose conserved rows equal the snapshot bit for bit.

    Args:
        nsf: Smooth Navier-Stokes-Fourier snapshot
        epsilon: Relaxation time
        params: Model parameters
        well_prepared: Use the closure values; False sets V^II = 0

    Returns:
        PreparedData with the generalized field at the snapshot time
    """
    params = params.with_dim(1)
    if well_prepared:
        v_ii = closure_variables(nsf, epsilon, params)
    else:
        v_ii = np.zeros((nsf.grid.n_cells, 2))

    U = from_normal(NormalState(V_I=nsf.U.copy(), V_II=v_ii), params)
    data = PreparedData(
        field=Field(grid=nsf.grid, U=U, t=nsf.t),
        epsilon=epsilon,
        v_ii=v_ii,
        well_prepared=well_prepared,
    )
    logger.debug(f"Prepared data for eps={epsilon:g}: max |V^II|={data.v_ii_max:.3e}")
    return data
