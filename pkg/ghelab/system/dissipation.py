"""Dissipation matrix, relaxation source and the stiff relaxation solve.

Sign bookkeeping lives here and in normal_form: the dissipative entropic
variables are eta_{U^II} = (w/alpha1, c/alpha2) = (-q, -tau/theta).
M depends on the state only through theta(nu, u), so evaluating it at
(nu, u, eps w, eps c) changes nothing.
"""

import logging

import numpy as np

from ..errors import ConvergenceError
from ..models.layout import get_layout
from ..models.params import ModelParams
from ..thermo.eos import eos_equilibrium
from ..thermo.entropy import primitives

logger = logging.getLogger(__name__)


def dissipative_variables(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """eta_{U^II} = (w/alpha1, c/alpha2), shape (..., n_dissipative)."""
    prim = primitives(U, params)
    return np.concatenate([prim.w / params.alpha1, prim.c / params.alpha2], axis=-1)


def _entropy_weights(params: ModelParams) -> np.ndarray:
    layout = get_layout(params.dim)
    return np.concatenate([
        np.full(params.dim, params.alpha1),
        np.full(layout.n_sym, params.alpha2),
    ])


def _matrix_from_temperature(theta: np.ndarray, params: ModelParams) -> np.ndarray:
    layout = get_layout(params.dim)
    n = layout.n_dissipative
    d = params.dim
    theta = np.asarray(theta, dtype=float)

    iso = np.outer(layout.identity, layout.identity) / d
    stress_block = (np.eye(layout.n_sym) - iso) / params.xi + iso / params.kappa

    M = np.zeros(theta.shape + (n, n))
    heat = np.arange(d)
    M[..., heat, heat] = (1.0 / (params.lam * theta**2))[..., None]
    M[..., d:, d:] = theta[..., None, None] * stress_block
    return M


def dissipation_action(U: np.ndarray, Y: np.ndarray, params: ModelParams) -> np.ndarray:
    """Apply M(U) to Y = (Y_w, Y_c) laid out like eta_{U^II}.

    Heat block Y_w/(lambda theta^2); stress block
    theta [dev(Y_c)/xi + tr(Y_c) I/(d kappa)].
    """
    layout = get_layout(params.dim)
    prim = primitives(U, params)
    theta = prim.u / params.c_v
    Y = np.asarray(Y, dtype=float)
    Y_w = Y[..., : params.dim]
    Y_c = Y[..., params.dim:]

    heat = Y_w / (params.lam * theta**2)[..., None]
    iso = (layout.trace(Y_c) / params.dim)[..., None] * layout.identity
    stress = theta[..., None] * ((Y_c - iso) / params.xi + iso / params.kappa)
    return np.concatenate([heat, stress], axis=-1)


def dissipation_matrix(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Dense M(U), shape (..., n_dissipative, n_dissipative)."""
    prim = primitives(U, params)
    return _matrix_from_temperature(prim.u / params.c_v, params)


def fns_inverse(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """(K^FNS)^-1 evaluated at the equilibrium temperature T(nu, u)."""
    prim = primitives(U, params)
    _, temperature, _ = eos_equilibrium(prim.nu, prim.u, params)
    return _matrix_from_temperature(temperature, params)


def relaxation_source(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Source term: zero in the conserved rows, -(1/eps^2) M eta_{U^II} below."""
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    Y = dissipative_variables(U, params)
    out = np.zeros(U.shape)
    out[..., layout.dissipative] = -dissipation_action(U, Y, params) / params.epsilon**2
    return out


def entropy_production(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """sigma = -eps^-2 eta_{U^II} . M eta_{U^II} (never positive)."""
    Y = dissipative_variables(U, params)
    return -np.sum(Y * dissipation_action(U, Y, params), axis=-1) / params.epsilon**2


def relaxation_rates(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Decay rates of (w, dev c, tr c) with (nu, u) frozen, shape (..., 3)."""
    prim = primitives(U, params)
    theta = prim.u / params.c_v
    eps2 = params.epsilon**2
    return np.stack([
        1.0 / (eps2 * params.lam * theta**2 * params.alpha1 * prim.rho),
        theta / (eps2 * params.xi * params.alpha2 * prim.rho),
        theta / (eps2 * params.kappa * params.alpha2 * prim.rho),
    ], axis=-1)


def relax_exact(U: np.ndarray, h: float, params: ModelParams) -> np.ndarray:
    """Solve the relaxation ODE exactly over a time h.

    The conserved rows and hence theta are frozen, so the dissipative rows
    decay exponentially: w with the heat rate, the deviatoric and trace
    parts of c with the shear and bulk rates.
    """
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    rates = relaxation_rates(U, params)
    decay = np.exp(-h * rates)

    out = U.copy()
    out[..., layout.heat] = U[..., layout.heat] * decay[..., 0:1]

    C = U[..., layout.stress]
    iso = (layout.trace(C) / params.dim)[..., None] * layout.identity
    out[..., layout.stress] = (C - iso) * decay[..., 1:2] + iso * decay[..., 2:3]
    return out


def relax_newton(
    U: np.ndarray,
    h: float,
    params: ModelParams,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> np.ndarray:
    """Backward-Euler relaxation solved by Newton iteration.

    Solves X - X0 - h S(X) = 0 for the dissipative rows X with (nu, u)
    frozen.

    Raises:
        ConvergenceError: If the residual does not reach tol within max_iter
    """
    layout = get_layout(params.dim)
    U = np.asarray(U, dtype=float)
    prim = primitives(U, params)
    scale = 1.0 / (prim.rho[..., None] * _entropy_weights(params))
    M = dissipation_matrix(U, params)
    eps2 = params.epsilon**2

    X0 = U[..., layout.dissipative]
    X = X0.copy()
    jac = np.eye(layout.n_dissipative) + (h / eps2) * M * scale[..., None, :]
    reference = np.maximum(1.0, np.max(np.abs(X0)))

    for iteration in range(max_iter + 1):
        source = -np.einsum("...ij,...j->...i", M, X * scale) / eps2
        residual = X - X0 - h * source
        worst = float(np.max(np.abs(residual)))
        if worst <= tol * reference:
            logger.debug(f"Relaxation Newton converged in {iteration} iterations")
            break
        if iteration == max_iter:
            raise ConvergenceError(
                f"Relaxation Newton did not converge in {max_iter} iterations "
                f"(residual {worst:.3e})"
            )
        X = X - np.linalg.solve(jac, residual[..., None])[..., 0]

    out = U.copy()
    out[..., layout.dissipative] = X
    return out
