"""Discrete divergence-form operators, shifts and Doob transforms."""

from .assembly import (
    AssembledOperator,
    OperatorSpec,
    adjoint_defect,
    assemble,
    doob_transform,
    ground_state_identities,
    ground_state_transform,
    self_adjoint_defect,
    shift,
)

__all__ = [
    "AssembledOperator",
    "OperatorSpec",
    "adjoint_defect",
    "assemble",
    "doob_transform",
    "ground_state_identities",
    "ground_state_transform",
    "self_adjoint_defect",
    "shift",
]
