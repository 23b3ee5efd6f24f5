"""Equilibrium EOS, generalized entropy and its derivatives."""

from .concavity import (
    ConcavityResult,
    compose,
    concavity_witness,
    equilibrium_entropy,
    internal_energy,
    perspective,
)
from .eos import RHO_MAX, RHO_MIN, U_MIN, check_admissible, entropy_generalized, eos_equilibrium
from .entropy import (
    Primitives,
    admissible_mask,
    conjugates,
    conserved_from_primitives,
    entropy_derivatives,
    eta,
    eta_gradient,
    eta_hessian,
    primitives,
)

__all__ = [
    "ConcavityResult",
    "Primitives",
    "admissible_mask",
    "RHO_MAX",
    "RHO_MIN",
    "U_MIN",
    "check_admissible",
    "compose",
    "concavity_witness",
    "conjugates",
    "conserved_from_primitives",
    "entropy_derivatives",
    "entropy_generalized",
    "eos_equilibrium",
    "equilibrium_entropy",
    "eta",
    "eta_gradient",
    "eta_hessian",
    "internal_energy",
    "perspective",
    "primitives",
]
