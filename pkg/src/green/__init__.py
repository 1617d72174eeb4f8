"""Dirichlet Green kernels, principal eigenpairs and criticality classification."""

from .criticality import (
    BoxGroundState,
    Criticality,
    GroundStateReport,
    GrowthFit,
    Lambda0Estimate,
    box_ground_states,
    classify,
    decide_criticality,
    extrapolate_lambda0,
    fit_green_growth,
    green_monotonicity,
    lambda0_limit,
    mass_trend,
)
from .kernels import (
    GreenKernel,
    GreenSolver,
    InvarianceDefect,
    PrincipalPair,
    SparseSolve,
    dirichlet_green,
    doob_kernel_defect,
    invariance_defect,
    lambda0_lower_bound,
    principal_pair,
)

__all__ = [
    "BoxGroundState",
    "Criticality",
    "GreenKernel",
    "GreenSolver",
    "GroundStateReport",
    "GrowthFit",
    "InvarianceDefect",
    "Lambda0Estimate",
    "PrincipalPair",
    "SparseSolve",
    "box_ground_states",
    "classify",
    "decide_criticality",
    "dirichlet_green",
    "doob_kernel_defect",
    "extrapolate_lambda0",
    "fit_green_growth",
    "green_monotonicity",
    "invariance_defect",
    "lambda0_limit",
    "lambda0_lower_bound",
    "mass_trend",
    "principal_pair",
]
