"""Normal-form variables V = (U^I, eta_{U^II}) and the symmetrized matrices.

In normal form the system reads

    V_t + A_j V_xj + (1/eps) B_j V_xj = -(1/eps^2) (0, H V^II)

with A_j = J F_jU J^-1, B_j = J G_jU J^-1, H = eta_{U^II U^II} M and
J = dV/dU. The symmetrizer A0 = J^-T eta_UU J^-1 is block diagonal.
"""

from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import DomainError
from ..models.layout import get_layout
from ..models.params import ModelParams
from ..models.state import NormalState
from ..thermo.entropy import eta_hessian, primitives
from .dissipation import dissipation_matrix, dissipative_variables
from .jacobians import jacobians


def to_normal(U: np.ndarray, params: ModelParams) -> NormalState:
    """Map conserved states to V = (U^I, eta_{U^II})."""
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    return NormalState(
        V_I=U[..., layout.conserved].copy(),
        V_II=dissipative_variables(U, params),
    )


def from_normal(V: Union[NormalState, np.ndarray], params: ModelParams) -> np.ndarray:
    """Inverse of to_normal: rho w = rho alpha1 V_w, rho c = rho alpha2 V_c.

    Raises:
        DomainError: If the conserved block is inadmissible
    """
    layout = get_layout(params.dim)
    if not isinstance(V, NormalState):
        V = NormalState.from_vector(V, params.dim)

    V_I = np.asarray(V.V_I, dtype=float)
    V_II = np.asarray(V.V_II, dtype=float)
    U = np.zeros(V_I.shape[:-1] + (layout.n_state,))
    U[..., layout.conserved] = V_I
    # primitives() of the equilibrium part validates the conserved block
    primitives(U, params)

    rho = V_I[..., layout.rho][..., None]
    U[..., layout.heat] = rho * params.alpha1 * V_II[..., : params.dim]
    U[..., layout.stress] = rho * params.alpha2 * V_II[..., params.dim:]
    return U


def normal_jacobian(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """J = dV/dU = [[I, 0], [eta_{U^II U^I}, eta_{U^II U^II}]]."""
    layout = get_layout(params.dim)
    hess = eta_hessian(U, params)
    J = np.broadcast_to(np.eye(layout.n_state), hess.shape).copy()
    J[..., layout.dissipative, :] = hess[..., layout.dissipative, :]
    return J


def symmetrizer(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """A0(V) = J^-T eta_UU J^-1."""
    J_inv = np.linalg.inv(normal_jacobian(U, params))
    return np.swapaxes(J_inv, -1, -2) @ eta_hessian(U, params) @ J_inv


class NormalFormMatrices(BaseModel):
    """Coefficient matrices of the normal form at one state."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    J: np.ndarray = Field(description="dV/dU")
    A0: np.ndarray = Field(description="Block-diagonal symmetrizer")
    A: np.ndarray = Field(description="J F_jU J^-1 per direction")
    B: np.ndarray = Field(description="J G_jU J^-1 per direction")
    H: np.ndarray = Field(description="eta_{U^II U^II} M")
    M: np.ndarray = Field(description="Dissipation matrix")
    jacobians_converged: bool = Field(description="Richardson check of the flux Jacobians")


def normal_matrices(U: np.ndarray, params: ModelParams) -> NormalFormMatrices:
    """Normal-form matrices at a single state, shape (n_state,).

    Raises:
        DomainError: If dV/dU is singular
    """
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    J = normal_jacobian(U, params)
    try:
        J_inv = np.linalg.inv(J)
    except np.linalg.LinAlgError as e:
        raise DomainError(f"Normal-form Jacobian is singular: {e}") from e

    hess = eta_hessian(U, params)
    jac = jacobians(U, params)
    M = dissipation_matrix(U, params)
    dis = layout.dissipative
    return NormalFormMatrices(
        J=J,
        A0=J_inv.T @ hess @ J_inv,
        A=J @ jac.F_U @ J_inv,
        B=J @ jac.G_U @ J_inv,
        H=hess[dis, dis] @ M,
        M=M,
        jacobians_converged=jac.converged,
    )
