"""Defect of the generalized solution against the first Maxwell iteration."""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field as PydanticField

from ..models.params import ModelParams
from ..solvers.grid import Field, NsfField, ddx, ddx4, l2_norm
from ..solvers.nsf import euler_primitives
from ..system.dissipation import relaxation_rates
from ..thermo.entropy import conjugates, primitives

logger = logging.getLogger(__name__)

FLOOR_FACTOR = 10.0


class MaxwellDefect(BaseModel):
    """L2 norms of q + eps lambda T_x and tau + eps D[v] with their floors."""

    epsilon: float = PydanticField(gt=0)
    heat: float = PydanticField(description="||q + eps lambda theta_x||")
    stress: float = PydanticField(description="||tau + eps kappa v_x||")
    heat_floor: float = PydanticField(default=0.0, description="Discretization floor of the heat defect")
    stress_floor: float = PydanticField(default=0.0, description="Discretization floor of the stress defect")
    heat_gap: Optional[float] = PydanticField(default=None, description="||q - q_NSF||")
    stress_gap: Optional[float] = PydanticField(default=None, description="||tau - tau_NSF||")

    def resolved(self, quantity: str, factor: float = FLOOR_FACTOR) -> bool:
        """True if the defect clears its floor by the given factor."""
        value = getattr(self, quantity)
        floor = getattr(self, f"{quantity}_floor")
        return value > factor * floor


def splitting_floor(field: Field, params: ModelParams, dt: float) -> np.ndarray:
    """Fixed-point shift (k dt)^2/24 of Strang splitting for heat and stress rates."""
    rates = relaxation_rates(field.U, params)
    k = np.max(rates[:, [0, 2]], axis=0)
    return (k * dt) ** 2 / 24.0


def maxwell_defect(
    field: Field,
    params: ModelParams,
    epsilon: float,
    reference: Optional[NsfField] = None,
    dt: Optional[float] = None,
    splitting: str = "etd",
) -> MaxwellDefect:
    """Measure how far (q, tau) of a generalized snapshot are from the closure.

    Gradients are taken from the snapshot's own theta and v. The floor is
    the gap between second- and fourth-order derivatives of the same
    fields; for Strang splitting the fixed-point shift of the relaxation
    step over dt is added.

    Args:
        field: Generalized snapshot
        params: Model parameters
        epsilon: Relaxation time of the run
        reference: Navier-Stokes-Fourier field on the same grid, for the gap
        dt: Time step of the run (needed for the Strang floor)
        splitting: Splitting the run used

    Returns:
        MaxwellDefect with norms, floors and optional gaps
    """
    params = params.with_dim(1).with_epsilon(epsilon)
    dx = field.grid.dx
    prim = primitives(field.U, params)
    conj = conjugates(field.U, params)
    theta = conj.theta
    v = prim.v[:, 0]
    q = conj.q[:, 0]
    tau = conj.tau[:, 0]

    el = epsilon * params.lam
    ek = epsilon * params.kappa
    heat_floor = el * l2_norm(ddx(theta, dx) - ddx4(theta, dx), dx)
    stress_floor = ek * l2_norm(ddx(v, dx) - ddx4(v, dx), dx)
    if splitting == "strang" and dt is not None:
        shift = splitting_floor(field, params, dt)
        heat_floor += float(shift[0]) * l2_norm(q, dx)
        stress_floor += float(shift[1]) * l2_norm(tau, dx)

    defect = MaxwellDefect(
        epsilon=epsilon,
        heat=l2_norm(q + el * ddx(theta, dx), dx),
        stress=l2_norm(tau + ek * ddx(v, dx), dx),
        heat_floor=heat_floor,
        stress_floor=stress_floor,
    )

    if reference is not None:
        _, v_ref, _, temperature, _ = euler_primitives(reference.U, params)
        defect.heat_gap = l2_norm(q + el * ddx(temperature, dx), dx)
        defect.stress_gap = l2_norm(tau + ek * ddx(v_ref, dx), dx)

    logger.info(
        f"Maxwell eps={epsilon:g}: heat={defect.heat:.3e} (floor {defect.heat_floor:.3e}), "
        f"stress={defect.stress:.3e} (floor {defect.stress_floor:.3e})"
    )
    return defect
