"""Relaxation-limit experiments: prepared data, residuals, Maxwell defect and fits."""

from .experiment import Experiment
from .fitting import exact_result, loglog_fit, require_points
from .maxwell import MaxwellDefect, maxwell_defect
from .prepare import PreparedData, closure_variables, prepare
from .residual import ResidualNorms, residual_norms

__all__ = [
    "Experiment",
    "MaxwellDefect",
    "PreparedData",
    "ResidualNorms",
    "closure_variables",
    "exact_result",
    "loglog_fit",
    "maxwell_defect",
    "prepare",
    "require_points",
    "residual_norms",
]
