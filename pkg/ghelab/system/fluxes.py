"""Convective flux F and stiff flux G of the scaled generalized system.

The system reads

    U_t + div F(U) + (1/eps) div G(U) = -(1/eps^2) (0, M eta_{U^II})

Fluxes are returned with shape (..., d, n_state): one flux vector per
direction j.
"""

import numpy as np

from ..models.layout import get_layout
from ..models.params import ModelParams
from ..models.state import FluxPair
from ..thermo.entropy import conjugates, primitives


def flux_F(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Convective flux F_j = v_j U + (0, pi e_j, pi v_j, 0, 0)."""
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    prim = primitives(U, params)
    pi = params.R_gas * prim.rho * prim.u / params.c_v

    F = prim.v[..., :, None] * U[..., None, :]
    for j in range(params.dim):
        F[..., j, layout.mom.start + j] += pi
        F[..., j, layout.energy] += pi * prim.v[..., j]
    return F


def flux_G(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Stiff flux G_j = (0, tau_.j, q_j + (tau v)_j, delta_ij/theta, -sym(e_j v)).

    The stress rows are linear in v: for the packed entry (a, b) the flux in
    direction j is -(delta_jb v_a + delta_ja v_b)/2 times the packing
    weight, so div G reproduces -sym(grad v) exactly.
    """
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    prim = primitives(U, params)
    conj = conjugates(U, params)
    tau = layout.unpack(conj.tau)
    tau_v = np.einsum("...ij,...j->...i", tau, prim.v)

    G = np.zeros(U.shape[:-1] + (params.dim, layout.n_state))
    for j in range(params.dim):
        G[..., j, layout.mom] = tau[..., :, j]
        G[..., j, layout.energy] = conj.q[..., j] + tau_v[..., j]
        G[..., j, layout.heat.start + j] = 1.0 / conj.theta
        for k, (a, b) in enumerate(layout.pairs):
            entry = np.zeros(prim.rho.shape)
            if j == b:
                entry = entry + prim.v[..., a]
            if j == a:
                entry = entry + prim.v[..., b]
            G[..., j, layout.stress.start + k] = -0.5 * layout.weights[k] * entry
    return G


def fluxes(U: np.ndarray, params: ModelParams) -> FluxPair:
    """Both fluxes in one bundle."""
    return FluxPair(F=flux_F(U, params), G=flux_G(U, params))


def total_flux(U: np.ndarray, params: ModelParams, direction: int = 0) -> np.ndarray:
    """F_j + G_j/eps in one direction, shape (..., n_state)."""
    return (
        flux_F(U, params)[..., direction, :]
        + flux_G(U, params)[..., direction, :] / params.epsilon
    )
