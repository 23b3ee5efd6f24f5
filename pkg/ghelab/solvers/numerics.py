"""Finite-volume building blocks: reconstruction, Rusanov flux, SSP-RK2."""

from typing import Callable, Tuple

import numpy as np

FluxFunction = Callable[[np.ndarray], np.ndarray]


def minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minmod limiter: smaller-magnitude argument when signs agree, else 0."""
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def reconstruct(
    U: np.ndarray,
    method: str = "linear",
    limiter: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """Left and right states at interface i+1/2 for every cell i.

    Args:
        U: Cell averages, shape (N, n)
        method: "constant" (first order) or "linear" (MUSCL)
        limiter: Use minmod slopes instead of central slopes

    Returns:
        Tuple (U_left, U_right), each of shape (N, n)
    """
    U_next = np.roll(U, -1, axis=0)
    if method == "constant":
        return U, U_next
    if method != "linear":
        raise ValueError(f"Unknown reconstruction: {method}")

    forward = U_next - U
    backward = U - np.roll(U, 1, axis=0)
    if limiter:
        slope = minmod(backward, forward)
    else:
        slope = 0.5 * (forward + backward)

    left = U + 0.5 * slope
    right = U_next - 0.5 * np.roll(slope, -1, axis=0)
    return left, right


def rusanov_flux(
    left: np.ndarray,
    right: np.ndarray,
    flux: FluxFunction,
    speed: FluxFunction,
) -> np.ndarray:
    """Local Lax-Friedrichs flux 0.5(F_L + F_R) - 0.5 a (U_R - U_L).

    a is the larger of the two states' speed bounds.
    """
    a = np.maximum(speed(left), speed(right))
    return 0.5 * (flux(left) + flux(right)) - 0.5 * a[:, None] * (right - left)


def flux_difference(interface_flux: np.ndarray, dx: float) -> np.ndarray:
    """-(F_{i+1/2} - F_{i-1/2})/dx on a periodic grid."""
    return -(interface_flux - np.roll(interface_flux, 1, axis=0)) / dx


def ssp_rk2(U: np.ndarray, rhs: FluxFunction, dt: float) -> np.ndarray:
    """Two-stage strong-stability-preserving Runge-Kutta step (Heun)."""
    stage = U + dt * rhs(U)
    return 0.5 * U + 0.5 * (stage + dt * rhs(stage))


def advance(U: np.ndarray, rhs: FluxFunction, dt: float, method: str) -> np.ndarray:
    """Forward Euler for first-order reconstruction, SSP-RK2 otherwise."""
    if method == "constant":
        return U + dt * rhs(U)
    return ssp_rk2(U, rhs, dt)
