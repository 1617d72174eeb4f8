"""Weighted Green operators: norms, spectra, Gelfand radii, resolvents and semigroups."""

from .norms import (
    GelfandSequence,
    InducedNorm,
    SchurBound,
    bound_target,
    gelfand_radius,
    gelfand_spread,
    induced_norm,
    matrix_norm,
    norm_table,
    schur_bound,
    similarity,
)
from .operators import (
    GreenOperator,
    SpectralReport,
    SpectrumStability,
    build_green_operator,
    eigen_identity_defect,
    green_operator,
    leading_spectrum_stability,
    spectrum,
)
from .semigroup import (
    GeneratorReport,
    generator,
    generator_checks,
    generator_difference,
    pseudoresolvent_defect,
    resolvent_defect,
)

__all__ = [
    "GelfandSequence",
    "GeneratorReport",
    "GreenOperator",
    "InducedNorm",
    "SchurBound",
    "SpectralReport",
    "SpectrumStability",
    "bound_target",
    "build_green_operator",
    "eigen_identity_defect",
    "gelfand_radius",
    "gelfand_spread",
    "generator",
    "generator_checks",
    "generator_difference",
    "green_operator",
    "induced_norm",
    "leading_spectrum_stability",
    "matrix_norm",
    "norm_table",
    "pseudoresolvent_defect",
    "resolvent_defect",
    "schur_bound",
    "similarity",
    "spectrum",
]
