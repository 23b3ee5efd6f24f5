"""Initial conditions on a periodic grid.

All profiles are given as cell-center values of (rho, v, T) and returned
as Navier-Stokes-Fourier fields; generalized fields are built from them
by equilibrium_field or the harness' prepare.
"""

from typing import Callable, Dict

import numpy as np

from ..models.params import ModelParams
from .grid import Grid1D, NsfField

Profile = Callable[[Grid1D, ModelParams, float], NsfField]


def from_profiles(
    grid: Grid1D,
    rho: np.ndarray,
    v: np.ndarray,
    temperature: np.ndarray,
    params: ModelParams,
) -> NsfField:
    """Build (rho, rho v, rho e) from density, velocity and temperature."""
    u = params.c_v * np.asarray(temperature, dtype=float)
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    U = np.stack([rho, rho * v, rho * (u + 0.5 * v * v)], axis=-1)
    return NsfField(grid=grid, U=U)


def smooth_wave(grid: Grid1D, params: ModelParams, amplitude: float = 0.1) -> NsfField:
    """rho = 1 + A sin(2 pi x/L), v = 0, T = 1."""
    x = grid.centers
    rho = 1.0 + amplitude * np.sin(2.0 * np.pi * x / grid.length)
    return from_profiles(grid, rho, np.zeros_like(x), np.ones_like(x), params)


def equilibrium(grid: Grid1D, params: ModelParams, amplitude: float = 0.0) -> NsfField:
    """Uniform rest state rho = 1, T = 1 (amplitude is ignored)."""
    ones = np.ones(grid.n_cells)
    return from_profiles(grid, ones, np.zeros_like(ones), ones, params)


def heat_pulse(
    grid: Grid1D,
    params: ModelParams,
    amplitude: float = 0.1,
    width: float = 0.2,
) -> NsfField:
    """Fluid at rest with a compactly supported cos^2 temperature bump at L/2."""
    x = grid.centers
    r = (x - 0.5 * grid.length) / width
    bump = np.where(np.abs(r) < 0.5, np.cos(np.pi * r) ** 2, 0.0)
    ones = np.ones_like(x)
    return from_profiles(grid, ones, np.zeros_like(x), 1.0 + amplitude * bump, params)


def manufactured(grid: Grid1D, params: ModelParams, amplitude: float = 0.1) -> NsfField:
    """Smooth profiles in all of rho, v and T, for refinement studies."""
    k = 2.0 * np.pi * grid.centers / grid.length
    rho = 1.0 + amplitude * np.sin(k)
    v = 0.5 * amplitude * np.sin(k + 1.0)
    temperature = 1.0 + 0.5 * amplitude * np.cos(k)
    return from_profiles(grid, rho, v, temperature, params)


INITIAL_CONDITIONS: Dict[str, Profile] = {
    "smooth_wave": smooth_wave,
    "equilibrium": equilibrium,
    "heat_pulse": heat_pulse,
    "manufactured": manufactured,
}


def initial_condition(
    name: str,
    grid: Grid1D,
    params: ModelParams,
    amplitude: float = 0.1,
) -> NsfField:
    """Look up and evaluate a named initial condition.

    Raises:
        ValueError: If the name is unknown
    """
    try:
        profile = INITIAL_CONDITIONS[name]
    except KeyError:
        raise ValueError(
            f"Unknown initial condition {name!r}; choose from {sorted(INITIAL_CONDITIONS)}"
        ) from None
    return profile(grid, params, amplitude)
