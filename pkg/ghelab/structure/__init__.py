"""Pointwise verification of convexity, symmetrizability and dissipation."""

from .checks import (
    check_concavity_lemmas,
    check_convexity,
    check_dissipation,
    check_entropy_production,
    check_equilibrium_blocks,
    check_hyperbolicity,
    check_symmetrizer,
)
from .sampling import StateSampler
from .suite import run_structure_suite, solver_entropy_check

__all__ = [
    "StateSampler",
    "check_concavity_lemmas",
    "check_convexity",
    "check_dissipation",
    "check_entropy_production",
    "check_equilibrium_blocks",
    "check_hyperbolicity",
    "check_symmetrizer",
    "run_structure_suite",
    "solver_entropy_check",
]
