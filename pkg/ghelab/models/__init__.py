"""Data models for the laboratory."""

from .layout import StateLayout, get_layout
from .params import ModelParams
from .reports import (
    CheckResult,
    ConvergenceReport,
    EpsilonResult,
    FitResult,
    StructureReport,
)
from .state import (
    ConjugateSet,
    ConservedState,
    EntropyDerivatives,
    FluxPair,
    NormalState,
)

__all__ = [
    "CheckResult",
    "ConjugateSet",
    "ConservedState",
    "ConvergenceReport",
    "EntropyDerivatives",
    "EpsilonResult",
    "FitResult",
    "FluxPair",
    "StructureReport",
    "ModelParams",
    "NormalState",
    "StateLayout",
    "get_layout",
]
