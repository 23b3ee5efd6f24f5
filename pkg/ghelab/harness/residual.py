"""Discrete residual of the generalized system at the well-prepared data.

The prepared state U(V_eps) is built from three equally spaced
Navier-Stokes-Fourier snapshots. Time derivatives are centered in t and
space derivatives are central differences on the periodic grid. The stiff
flux divergence is taken through the chain rule on the primitive fields,
so its 1/eps part cancels the relaxation source exactly.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..errors import InsufficientDataError
from ..models.params import ModelParams
from ..solvers.grid import NsfField, ddx, l2_norm
from ..solvers.nsf import dv_tensor, euler_flux, euler_primitives
from ..system.dissipation import relaxation_source
from ..system.fluxes import flux_F
from ..system.normal_form import normal_jacobian
from ..thermo.entropy import conjugates, primitives
from .prepare import prepare

logger = logging.getLogger(__name__)

CONSERVED = slice(0, 3)
DISSIPATIVE = slice(3, 5)


class ResidualNorms(BaseModel):
    """L2 norms of the normal-form residual at one relaxation time."""

    epsilon: float = Field(gt=0)
    r1: float = Field(description="||R^I||, closure part plus discretization floor")
    r1_closure: float = Field(description="eps-dependent part of R^I")
    r1_floor: float = Field(description="||U_t + (F_NSF)_x||, independent of eps")
    r2: float = Field(description="||R^II||")
    scale: float = Field(description="1 + ||(F_NSF)_x||, reference for round-off")
    time: float = Field(description="Time of the central snapshot")


def time_stencil(snapshots: Sequence[NsfField], rel_tol: float = 1e-9) -> Tuple[NsfField, NsfField, NsfField]:
    """The middle snapshot and its two neighbours.

    Raises:
        InsufficientDataError: With fewer than three snapshots or unequal spacing
    """
    if len(snapshots) < 3:
        raise InsufficientDataError(
            f"insufficient snapshots for a centered time derivative: {len(snapshots)}"
        )
    i = len(snapshots) // 2
    before, center, after = snapshots[i - 1], snapshots[i], snapshots[i + 1]
    h_before = center.t - before.t
    h_after = after.t - center.t
    if h_before <= 0.0 or abs(h_after - h_before) > rel_tol * max(h_before, h_after):
        raise InsufficientDataError(
            f"snapshots at t={before.t:g}, {center.t:g}, {after.t:g} are not equally spaced"
        )
    return before, center, after


def nsf_flux(field: NsfField, params: ModelParams) -> np.ndarray:
    """Pointwise Navier-Stokes-Fourier flux with central-difference gradients."""
    _, v, _, temperature, _ = euler_primitives(field.U, params)
    dx = field.grid.dx
    D = dv_tensor(v, dx, params)
    flux = euler_flux(field.U, params)
    flux[:, 1] -= D
    flux[:, 2] -= D * v + params.lam * ddx(temperature, dx)
    return flux


def stiff_flux_divergence(U: np.ndarray, dx: float, params: ModelParams) -> np.ndarray:
    """d/dx G(U) with the heat and stress rows by the chain rule."""
    prim = primitives(U, params)
    conj = conjugates(U, params)
    theta = conj.theta
    v = prim.v[:, 0]
    q = conj.q[:, 0]
    tau = conj.tau[:, 0]

    out = np.zeros(U.shape)
    out[:, 1] = ddx(tau, dx)
    out[:, 2] = ddx(q + tau * v, dx)
    out[:, 3] = -ddx(theta, dx) / theta**2
    out[:, 4] = -ddx(v, dx)
    return out


def residual_norms(
    snapshots: Sequence[NsfField],
    epsilon: float,
    params: ModelParams,
) -> ResidualNorms:
    """Norms of R = J (U_t + F_x + G_x/eps - S) at U(V_eps).

    Args:
        snapshots: Equally spaced Navier-Stokes-Fourier snapshots (at least three)
        epsilon: Relaxation time
        params: Model parameters

    Returns:
        ResidualNorms at the central snapshot time

    Raises:
        InsufficientDataError: If the snapshots do not support a centered derivative
    """
    params = params.with_dim(1).with_epsilon(epsilon)
    before, center, after = time_stencil(snapshots)
    delta = center.t - before.t
    dx = center.grid.dx

    U_before = prepare(before, epsilon, params).field.U
    U = prepare(center, epsilon, params).field.U
    U_after = prepare(after, epsilon, params).field.U

    U_t = (U_after - U_before) / (2.0 * delta)
    F = flux_F(U, params)[:, 0, :]
    dG = stiff_flux_divergence(U, dx, params)
    r = U_t + ddx(F, dx) + dG / epsilon - relaxation_source(U, params)

    reference = nsf_flux(center, params)
    floor = U_t[:, CONSERVED] + ddx(reference, dx)
    closure = ddx(F[:, CONSERVED] - reference, dx) + dG[:, CONSERVED] / epsilon

    J = normal_jacobian(U, params)
    R = np.einsum("nij,nj->ni", J, r)

    norms = ResidualNorms(
        epsilon=epsilon,
        r1=l2_norm(R[:, CONSERVED], dx),
        r1_closure=l2_norm(closure, dx),
        r1_floor=l2_norm(floor, dx),
        r2=l2_norm(R[:, DISSIPATIVE], dx),
        scale=1.0 + l2_norm(ddx(reference, dx), dx),
        time=center.t,
    )
    logger.info(
        f"Residual eps={epsilon:g}: |R^I|={norms.r1:.3e} (closure {norms.r1_closure:.3e}, "
        f"floor {norms.r1_floor:.3e}), |R^II|={norms.r2:.3e}"
    )
    return norms
