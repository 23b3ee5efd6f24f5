"""Finite-volume solvers for the generalized and Navier-Stokes-Fourier systems."""

from .ghe import (
    ImexConfig,
    Trajectory,
    equilibrium_field,
    etd_update,
    hyperbolic_rhs,
    relax,
    run,
    stable_dt,
    step,
)
from .grid import Field, Grid1D, NsfField, ddx, ddx4, l2_norm, linf_norm, restrict
from .initial import INITIAL_CONDITIONS, from_profiles, initial_condition
from .nsf import (
    dv_tensor,
    dv_tensor_pointwise,
    euler_primitives,
    maxwell_closure,
    nsf_entropy,
    nsf_stable_dt,
    nsf_step,
    restrict_field,
    run_nsf,
)

__all__ = [
    "Field",
    "Grid1D",
    "INITIAL_CONDITIONS",
    "ImexConfig",
    "NsfField",
    "Trajectory",
    "ddx",
    "ddx4",
    "dv_tensor",
    "dv_tensor_pointwise",
    "equilibrium_field",
    "etd_update",
    "euler_primitives",
    "from_profiles",
    "hyperbolic_rhs",
    "initial_condition",
    "l2_norm",
    "linf_norm",
    "maxwell_closure",
    "nsf_entropy",
    "nsf_stable_dt",
    "nsf_step",
    "relax",
    "restrict",
    "restrict_field",
    "run",
    "run_nsf",
    "stable_dt",
    "step",
]
