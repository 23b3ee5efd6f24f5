"""Closed-form characteristic speeds of the one-dimensional system.

In the variables (rho, v, u, w, c) the convection matrix minus v I maps
{v, w} to {rho, u, c} and back, so its nonzero eigenvalues are +-sqrt(mu)
where mu runs over the eigenvalues of a 2x2 product matrix. Symmetric
hyperbolicity makes both mu real and nonnegative.
"""

import numpy as np

from ..errors import DomainError
from ..models.params import ModelParams
from ..thermo.entropy import primitives


def squared_speeds(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Eigenvalues mu of the reduced 2x2 matrix, shape (..., 2), ascending.

    Raises:
        DomainError: If called for dim != 1
    """
    if params.dim != 1:
        raise DomainError("Closed-form speeds are only available for dim=1")

    prim = primitives(U, params)
    rho, u = prim.rho, prim.u
    c = prim.c[..., 0]
    a = 1.0 / params.epsilon
    cv, R = params.c_v, params.R_gas

    p = R * rho * u / cv
    p_rho = R * u / cv
    p_u = R * rho / cv
    tau = -u * c / (cv * params.alpha2)
    tau_u = -c / (cv * params.alpha2)
    tau_c = -u / (cv * params.alpha2)
    rho2 = rho * rho

    a11 = p_rho + (p_u + a * tau_u) * (p + a * tau) / rho2 - a * a * tau_c / rho2
    a12 = -a * (p_u + a * tau_u) / (params.alpha1 * rho2)
    a21 = -a * cv * (p + a * tau) / (u * u * rho2)
    a22 = a * a * cv / (params.alpha1 * u * u * rho2)

    half_trace = 0.5 * (a11 + a22)
    det = a11 * a22 - a12 * a21
    root = np.sqrt(np.maximum(half_trace * half_trace - det, 0.0))
    mu = np.stack([half_trace - root, half_trace + root], axis=-1)
    return np.maximum(mu, 0.0)


def characteristic_speeds(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """All five characteristic speeds v -+ sqrt(mu), v, sorted ascending."""
    prim = primitives(U, params)
    v = prim.v[..., 0]
    roots = np.sqrt(squared_speeds(U, params))
    speeds = np.stack([
        v - roots[..., 1], v - roots[..., 0], v, v + roots[..., 0], v + roots[..., 1],
    ], axis=-1)
    return np.sort(speeds, axis=-1)


def max_speed(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Largest |speed| per state: |v| + sqrt(max mu)."""
    prim = primitives(U, params)
    return np.abs(prim.v[..., 0]) + np.sqrt(squared_speeds(U, params)[..., 1])
