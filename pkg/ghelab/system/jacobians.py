"""Finite-difference flux Jacobians for structure verification."""

import logging
from typing import Callable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..models.params import ModelParams
from .fluxes import flux_F, flux_G

logger = logging.getLogger(__name__)


class JacobianSet(BaseModel):
    """Flux Jacobians at one state, shape (d, n_state, n_state)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    F_U: np.ndarray = Field(description="dF_j/dU per direction")
    G_U: np.ndarray = Field(description="dG_j/dU per direction")
    converged: bool = Field(description="Richardson pair agreed within tolerance")
    richardson_defect: float = Field(description="Relative gap between the h and h/2 estimates")


def central_difference(
    func: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    steps: np.ndarray,
) -> np.ndarray:
    """Central-difference derivative of func at x.

    Args:
        func: Vectorized function mapping (batch, n) to (batch, ...)
        x: Point, shape (n,)
        steps: Step per coordinate, shape (n,)

    Returns:
        Array of shape (..., n) whose last axis indexes the coordinate
    """
    shift = np.diag(steps)
    diff = func(x + shift) - func(x - shift)
    diff = diff / steps.reshape((-1,) + (1,) * (diff.ndim - 1))
    return np.moveaxis(0.5 * diff, 0, -1)


def richardson_derivative(
    func: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    rel_step: float = 1e-3,
) -> Tuple[np.ndarray, float]:
    """Richardson-extrapolated central difference and its self-consistency gap.

    Returns:
        Tuple (derivative, relative gap between the h and h/2 estimates)
    """
    x = np.asarray(x, dtype=float)
    steps = rel_step * (1.0 + np.abs(x))
    coarse = central_difference(func, x, steps)
    fine = central_difference(func, x, 0.5 * steps)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    gap = float(np.max(np.abs(fine - coarse))) / scale
    return (4.0 * fine - coarse) / 3.0, gap


def jacobians(
    U: np.ndarray,
    params: ModelParams,
    rel_step: float = 1e-3,
    tol: float = 1e-4,
) -> JacobianSet:
    """Jacobians of F_j and G_j at a single state.

    Args:
        U: State vector, shape (n_state,)
        params: Model parameters
        rel_step: Step relative to 1 + |U_k|
        tol: Largest accepted Richardson gap

    Returns:
        JacobianSet; converged is False when the Richardson check fails
    """
    F_U, gap_F = richardson_derivative(lambda X: flux_F(X, params), U, rel_step)
    G_U, gap_G = richardson_derivative(lambda X: flux_G(X, params), U, rel_step)
    defect = max(gap_F, gap_G)
    converged = defect <= tol
    if not converged:
        logger.warning(f"Flux Jacobian Richardson check failed: gap={defect:.3e}")
    return JacobianSet(F_U=F_U, G_U=G_U, converged=converged, richardson_defect=defect)
