"""Mathematical entropy eta(U) = -rho s and its derivatives.

All functions accept states of shape (..., n_state) and broadcast over the
leading axes.
"""

from typing import NamedTuple

import numpy as np

from ..errors import DomainError
from ..models.layout import get_layout
from ..models.params import ModelParams
from ..models.state import ConjugateSet, EntropyDerivatives
from .eos import RHO_MAX, RHO_MIN, U_MIN, check_admissible, entropy_generalized


class Primitives(NamedTuple):
    """Per-mass variables of a state."""

    rho: np.ndarray
    nu: np.ndarray
    v: np.ndarray
    e: np.ndarray
    u: np.ndarray
    w: np.ndarray
    c: np.ndarray


def primitives(U: np.ndarray, params: ModelParams) -> Primitives:
    """Split conserved states into density, velocity, energies and w, c.

    Raises:
        DomainError: If any state is inadmissible
        ValueError: If the trailing axis does not match the layout
    """
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != layout.n_state:
        raise ValueError(
            f"State has {U.shape[-1]} rows, expected {layout.n_state} for dim={params.dim}"
        )

    rho = U[..., layout.rho]
    bad = ~np.isfinite(rho) | (rho < RHO_MIN) | (rho > RHO_MAX)
    if np.any(bad):
        raise DomainError(f"Density out of range: rho={rho[bad].flat[0]!r}")

    nu = 1.0 / rho
    v = U[..., layout.mom] / rho[..., None]
    e = U[..., layout.energy] / rho
    u = e - 0.5 * np.sum(v * v, axis=-1)
    check_admissible(nu, u)

    w = U[..., layout.heat] / rho[..., None]
    c = U[..., layout.stress] / rho[..., None]
    return Primitives(rho=rho, nu=nu, v=v, e=e, u=u, w=w, c=c)


def admissible_mask(U: np.ndarray, conserved_rows: int, dim: int = 1) -> np.ndarray:
    """Boolean mask of admissible states, never raising.

    Only the leading (rho, m, E) rows are inspected, so the function serves
    both the generalized and the Navier-Stokes-Fourier layouts.
    """
    U = np.asarray(U, dtype=float)
    rho = U[..., 0]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = U[..., 1 : 1 + dim] / rho[..., None]
        u = U[..., 1 + dim] / rho - 0.5 * np.sum(v * v, axis=-1)
        finite = np.all(np.isfinite(U[..., :conserved_rows]), axis=-1)
        return finite & (rho >= RHO_MIN) & (rho <= RHO_MAX) & np.isfinite(u) & (u > U_MIN)


def conserved_from_primitives(
    rho: np.ndarray,
    v: np.ndarray,
    u: np.ndarray,
    w: np.ndarray,
    c: np.ndarray,
    params: ModelParams,
) -> np.ndarray:
    """Assemble conserved states from per-mass variables.

    Args:
        rho: Density, shape (...)
        v: Velocity, shape (..., d)
        u: Specific internal energy, shape (...)
        w: Per-mass heat variable, shape (..., d)
        c: Per-mass stress variable, packed, shape (..., n_sym)
        params: Model parameters

    Returns:
        States of shape (..., n_state)
    """
    layout = get_layout(params.dim)
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    U = np.empty(rho.shape + (layout.n_state,))
    U[..., layout.rho] = rho
    U[..., layout.mom] = rho[..., None] * v
    U[..., layout.energy] = rho * (np.asarray(u, dtype=float) + 0.5 * np.sum(v * v, axis=-1))
    U[..., layout.heat] = rho[..., None] * np.asarray(w, dtype=float)
    U[..., layout.stress] = rho[..., None] * np.asarray(c, dtype=float)
    return U


def eta(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Mathematical entropy eta(U) = -rho s(1/rho, e - |v|^2/2, w, c)."""
    prim = primitives(U, params)
    return -prim.rho * entropy_generalized(prim.nu, prim.u, prim.w, prim.c, params)


def conjugates(U: np.ndarray, params: ModelParams) -> ConjugateSet:
    """Non-equilibrium temperature, pressure, heat flux and stress.

    With constant entropy weights theta and pi coincide with the
    equilibrium T and p for every (w, c).
    """
    prim = primitives(U, params)
    theta = prim.u / params.c_v
    zeta_w = -prim.w / params.alpha1
    zeta_c = -prim.c / params.alpha2
    return ConjugateSet(
        theta=theta,
        pi=params.R_gas * theta / prim.nu,
        q=zeta_w,
        tau=theta[..., None] * zeta_c,
        zeta_w=zeta_w,
        zeta_c=zeta_c,
    )


def eta_gradient(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Gradient eta_U = (eta_rho, v/theta, -1/theta, -q, -tau/theta).

    eta_rho follows from differentiating -rho s through nu = 1/rho and the
    per-mass variables; it satisfies pi/theta = eta_U . U - eta.
    """
    layout = get_layout(params.dim)
    prim = primitives(U, params)
    s = entropy_generalized(prim.nu, prim.u, prim.w, prim.c, params)
    inv_theta = params.c_v / prim.u

    v2 = np.sum(prim.v * prim.v, axis=-1)
    w2 = np.sum(prim.w * prim.w, axis=-1)
    c2 = np.sum(prim.c * prim.c, axis=-1)

    grad = np.empty(np.shape(U))
    grad[..., layout.rho] = (
        -s + params.R_gas + inv_theta * (prim.e - v2) - w2 / params.alpha1 - c2 / params.alpha2
    )
    grad[..., layout.mom] = prim.v * inv_theta[..., None]
    grad[..., layout.energy] = -inv_theta
    grad[..., layout.heat] = prim.w / params.alpha1
    grad[..., layout.stress] = prim.c / params.alpha2
    return grad


def eta_hessian(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Analytic Hessian eta_UU, shape (..., n_state, n_state).

    Writing eta(U) = rho f(y) with y = (nu, v, e, w, c) = (1, m, E, W, C)/rho
    (first slot 1/rho) and f = -s gives eta_UU = Q^T f_yy Q / rho, where Q
    has -y in its first column and the identity elsewhere.
    """
    layout = get_layout(params.dim)
    prim = primitives(U, params)
    n = layout.n_state
    batch = prim.rho.shape

    y = np.empty(batch + (n,))
    y[..., layout.rho] = prim.nu
    y[..., layout.mom] = prim.v
    y[..., layout.energy] = prim.e
    y[..., layout.heat] = prim.w
    y[..., layout.stress] = prim.c

    # f_yy is block diagonal: nu | (v, e) | w | c
    f_yy = np.zeros(batch + (n, n))
    f_yy[..., 0, 0] = params.R_gas / prim.nu**2

    scale = params.c_v / prim.u**2
    mom = np.arange(layout.mom.start, layout.mom.stop)
    f_yy[..., mom[:, None], mom[None, :]] = scale[..., None, None] * (
        prim.u[..., None, None] * np.eye(params.dim)
        + prim.v[..., :, None] * prim.v[..., None, :]
    )
    f_yy[..., mom, layout.energy] = -scale[..., None] * prim.v
    f_yy[..., layout.energy, mom] = -scale[..., None] * prim.v
    f_yy[..., layout.energy, layout.energy] = scale

    heat = np.arange(layout.heat.start, layout.heat.stop)
    stress = np.arange(layout.stress.start, layout.stress.stop)
    f_yy[..., heat, heat] = 1.0 / params.alpha1
    f_yy[..., stress, stress] = 1.0 / params.alpha2

    Q = np.broadcast_to(np.eye(n), batch + (n, n)).copy()
    Q[..., :, 0] = -y

    hess = np.einsum("...ki,...kl,...lj->...ij", Q, f_yy, Q) / prim.rho[..., None, None]
    return 0.5 * (hess + np.swapaxes(hess, -1, -2))


def entropy_derivatives(U: np.ndarray, params: ModelParams) -> EntropyDerivatives:
    """eta, eta_U and eta_UU in one bundle."""
    return EntropyDerivatives(
        eta=eta(U, params),
        grad=eta_gradient(U, params),
        hess=eta_hessian(U, params),
    )
