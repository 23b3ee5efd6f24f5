"""Ideal-gas equilibrium equation of state and the generalized entropy."""

from typing import Tuple

import numpy as np

from ..errors import DomainError
from ..models.params import ModelParams

# Admissible set
RHO_MIN = 1e-6
RHO_MAX = 1e6
U_MIN = 1e-10


def _first_bad(mask: np.ndarray) -> str:
    index = np.argwhere(mask)[0]
    return str(tuple(int(i) for i in index)) if index.size else "()"


def check_admissible(nu: np.ndarray, u: np.ndarray) -> None:
    """Raise DomainError unless every (nu, u) pair is admissible.

    Args:
        nu: Specific volume
        u: Specific internal energy

    Raises:
        DomainError: On non-finite values, nu outside [1/RHO_MAX, 1/RHO_MIN] or u <= U_MIN
    """
    nu = np.asarray(nu, dtype=float)
    u = np.asarray(u, dtype=float)

    bad_nu = ~np.isfinite(nu) | (nu < 1.0 / RHO_MAX) | (nu > 1.0 / RHO_MIN)
    if np.any(bad_nu):
        where = _first_bad(bad_nu)
        raise DomainError(f"Specific volume out of range at {where}: nu={nu[bad_nu].flat[0]!r}")

    bad_u = ~np.isfinite(u) | (u <= U_MIN)
    if np.any(bad_u):
        where = _first_bad(bad_u)
        raise DomainError(f"Internal energy not positive at {where}: u={u[bad_u].flat[0]!r}")


def eos_equilibrium(
    nu: np.ndarray,
    u: np.ndarray,
    params: ModelParams,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equilibrium entropy, temperature and pressure.

    s_eq = c_v ln u + R ln nu, T = u/c_v, p = R u/(c_v nu).

    Args:
        nu: Specific volume (> 0)
        u: Specific internal energy (> 0)
        params: Model parameters

    Returns:
        Tuple (s_eq, T, p)

    Raises:
        DomainError: If (nu, u) is not admissible
    """
    nu = np.asarray(nu, dtype=float)
    u = np.asarray(u, dtype=float)
    check_admissible(nu, u)

    s_eq = params.c_v * np.log(u) + params.R_gas * np.log(nu)
    temperature = u / params.c_v
    pressure = params.R_gas * temperature / nu
    return s_eq, temperature, pressure


def entropy_generalized(
    nu: np.ndarray,
    u: np.ndarray,
    w: np.ndarray,
    c: np.ndarray,
    params: ModelParams,
) -> np.ndarray:
    """Generalized specific entropy s = s_eq - |w|^2/(2 alpha1) - |c|^2/(2 alpha2).

    Args:
        nu: Specific volume
        u: Specific internal energy
        w: Per-mass heat variable, shape (..., d)
        c: Per-mass stress variable in packed form, shape (..., n_sym)
        params: Model parameters

    Returns:
        Specific entropy with the leading shape of nu
    """
    s_eq, _, _ = eos_equilibrium(nu, u, params)
    w = np.asarray(w, dtype=float)
    c = np.asarray(c, dtype=float)
    return (
        s_eq
        - np.sum(w * w, axis=-1) / (2.0 * params.alpha1)
        - np.sum(c * c, axis=-1) / (2.0 * params.alpha2)
    )
