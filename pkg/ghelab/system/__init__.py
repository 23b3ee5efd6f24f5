"""Fluxes, dissipation and normal form of the scaled generalized system."""

from .dissipation import (
    dissipation_action,
    dissipation_matrix,
    dissipative_variables,
    entropy_production,
    fns_inverse,
    relax_exact,
    relax_newton,
    relaxation_rates,
    relaxation_source,
)
from .fluxes import flux_F, flux_G, fluxes, total_flux
from .jacobians import JacobianSet, jacobians, richardson_derivative
from .normal_form import (
    NormalFormMatrices,
    from_normal,
    normal_jacobian,
    normal_matrices,
    symmetrizer,
    to_normal,
)
from .speeds import characteristic_speeds, max_speed, squared_speeds

__all__ = [
    "JacobianSet",
    "NormalFormMatrices",
    "characteristic_speeds",
    "dissipation_action",
    "dissipation_matrix",
    "dissipative_variables",
    "entropy_production",
    "flux_F",
    "flux_G",
    "fluxes",
    "fns_inverse",
    "from_normal",
    "jacobians",
    "max_speed",
    "normal_jacobian",
    "normal_matrices",
    "relax_exact",
    "relax_newton",
    "relaxation_rates",
    "relaxation_source",
    "richardson_derivative",
    "squared_speeds",
    "symmetrizer",
    "to_normal",
    "total_flux",
]
