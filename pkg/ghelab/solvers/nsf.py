"""Explicit 1D reference solver for the Navier-Stokes-Fourier equations.

Euler fluxes use the Rusanov flux with the same reconstruction options as
the generalized solver; viscous and heat fluxes are compact central
differences at the interfaces.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError
from ..models.params import ModelParams
from ..thermo.eos import eos_equilibrium
from .ghe import ImexConfig, Trajectory, abort_from, check_interfaces, integrate
from .grid import NsfField, ddx, restrict
from .numerics import advance, flux_difference, reconstruct, rusanov_flux

logger = logging.getLogger(__name__)

NSF_ROWS = 3


def euler_primitives(U: np.ndarray, params: ModelParams) -> Tuple[np.ndarray, ...]:
    """(rho, v, u, T, p) of (N, 3) states.

    Raises:
        DomainError: If a state is inadmissible
    """
    rho = U[..., 0]
    if np.any(~np.isfinite(rho) | (rho <= 0.0)):
        raise DomainError("Density not positive in Navier-Stokes-Fourier state")
    v = U[..., 1] / rho
    u = U[..., 2] / rho - 0.5 * v * v
    _, temperature, pressure = eos_equilibrium(1.0 / rho, u, params)
    return rho, v, u, temperature, pressure


def euler_flux(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """(rho v, rho v^2 + p, (rho e + p) v)."""
    rho, v, _, _, p = euler_primitives(U, params)
    return np.stack([U[..., 1], U[..., 1] * v + p, (U[..., 2] + p) * v], axis=-1)


def euler_speed(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """|v| + sound speed."""
    rho, v, _, _, p = euler_primitives(U, params)
    return np.abs(v) + np.sqrt(params.gamma * p / rho)


def dv_tensor(v: np.ndarray, dx: float, params: ModelParams) -> np.ndarray:
    """D[v] on a 1D periodic grid: kappa dv/dx (the shear part vanishes in 1D)."""
    return params.kappa * ddx(np.asarray(v, dtype=float), dx)


def dv_tensor_pointwise(grad_v: np.ndarray, params: ModelParams) -> np.ndarray:
    """D[v] = xi (sym grad v - div v I/d) + kappa div v I for (..., d, d) gradients.

    grad_v[..., i, j] holds dv_i/dx_j.
    """
    grad_v = np.asarray(grad_v, dtype=float)
    d = grad_v.shape[-1]
    sym = 0.5 * (grad_v + np.swapaxes(grad_v, -1, -2))
    div = np.trace(grad_v, axis1=-2, axis2=-1)[..., None, None]
    eye = np.eye(d)
    return params.xi * (sym - div * eye / d) + params.kappa * div * eye


def viscous_flux(U: np.ndarray, dx: float, params: ModelParams) -> np.ndarray:
    """Interface fluxes (0, -D, -(D v + lambda dT/dx)) at i+1/2."""
    _, v, _, temperature, _ = euler_primitives(U, params)
    v_next = np.roll(v, -1)
    D = params.kappa * (v_next - v) / dx
    heat = params.lam * (np.roll(temperature, -1) - temperature) / dx
    v_face = 0.5 * (v + v_next)
    return np.stack([np.zeros_like(D), -D, -(D * v_face + heat)], axis=-1)


def nsf_rhs(
    U: np.ndarray,
    dx: float,
    params: ModelParams,
    config: ImexConfig,
    transport: bool = True,
) -> np.ndarray:
    """Semi-discrete right-hand side; transport=False leaves the Euler part only."""
    left, right = reconstruct(U, config.reconstruction, config.limiter)
    check_interfaces(left, right, NSF_ROWS)
    interface = rusanov_flux(
        left,
        right,
        lambda X: euler_flux(X, params),
        lambda X: euler_speed(X, params),
    )
    if transport:
        interface = interface + viscous_flux(U, dx, params)
    return flux_difference(interface, dx)


def nsf_stable_dt(
    field: NsfField,
    params: ModelParams,
    config: ImexConfig,
    transport: bool = True,
) -> Tuple[float, float]:
    """min(cfl dx/max|lambda|, 0.4 dx^2/nu_max) and the largest Euler speed."""
    speed = float(np.max(euler_speed(field.U, params)))
    if config.fixed_dt is not None:
        return config.fixed_dt, speed

    dx = field.grid.dx
    dt = config.cfl * dx / speed
    if transport:
        rho = field.U[:, 0]
        nu_max = float(np.max(np.maximum(params.kappa / rho, params.lam / (rho * params.c_v))))
        dt = min(dt, 0.4 * dx * dx / nu_max)
    return dt, speed


def nsf_step(
    field: NsfField,
    params: ModelParams,
    config: ImexConfig,
    dt: Optional[float] = None,
    transport: bool = True,
    step_index: int = 0,
) -> NsfField:
    """Advance the Navier-Stokes-Fourier field by one explicit step.

    Raises:
        NumericalAbort: If the new state is inadmissible
    """
    if dt is None:
        dt, _ = nsf_stable_dt(field, params, config, transport)

    U = field.U
    try:
        U = advance(U, lambda X: nsf_rhs(X, field.grid.dx, params, config, transport), dt,
                    config.reconstruction)
        euler_primitives(U, params)
    except DomainError as e:
        raise abort_from(e, U, NSF_ROWS, step_index, field.t) from e
    return field.advanced(U, field.t + dt)


def nsf_entropy(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """-rho s_eq, the equilibrium restriction of the mathematical entropy."""
    rho, _, u, _, _ = euler_primitives(U, params)
    s_eq, _, _ = eos_equilibrium(1.0 / rho, u, params)
    return -rho * s_eq


def run_nsf(
    initial: NsfField,
    params: ModelParams,
    config: ImexConfig,
    snapshot_times: Optional[Sequence[float]] = None,
    transport: bool = True,
) -> Trajectory:
    """Integrate the Navier-Stokes-Fourier system to config.t_end."""
    return integrate(
        initial,
        config.t_end,
        snapshot_times,
        advance_step=lambda f, dt, n: nsf_step(
            f, params, config, dt=dt, transport=transport, step_index=n
        ),
        dt_rule=lambda f: nsf_stable_dt(f, params, config, transport),
        entropy_density=lambda U: nsf_entropy(U, params),
        conserved_rows=NSF_ROWS,
        config=config,
        params=params,
        label="NSF",
    )


def restrict_field(field: NsfField, factor: int) -> NsfField:
    """Average a fine field onto a grid `factor` times coarser."""
    return NsfField(grid=field.grid.coarsened(factor), U=restrict(field.U, factor), t=field.t)


def maxwell_closure(field: NsfField, params: ModelParams, epsilon: float) -> Dict[str, np.ndarray]:
    """First Maxwell-iteration values q = -eps lambda T_x, tau = -eps D[v].

    Also returns the corresponding per-mass w, c and the temperature.
    """
    _, v, _, temperature, _ = euler_primitives(field.U, params)
    dx = field.grid.dx
    q = -epsilon * params.lam * ddx(temperature, dx)
    tau = -epsilon * dv_tensor(v, dx, params)
    return {
        "q": q,
        "tau": tau,
        "w": -params.alpha1 * q,
        "c": -params.alpha2 * tau / temperature,
        "theta": temperature,
    }
