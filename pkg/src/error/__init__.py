"""Error hierarchy and classification for the criticality workbench."""

from .classification import ErrorClassifier, ErrorSeverity, ExitStatus
from .core import (
    AssemblyError,
    BoxMismatch,
    ClabError,
    ComplexPrincipalEigenvalue,
    DegenerateTopEigenvalue,
    DenseLimitExceeded,
    DomainError,
    DriftTooStrong,
    EmptyDirectory,
    ExclusionTooLarge,
    ExponentOutOfRange,
    IdenticalShift,
    NonIncreasingRadii,
    NonPositiveConductance,
    NonPositiveInput,
    NonPositiveKernel,
    NonPositiveMeasure,
    NonPositiveTransformFunction,
    NotContractive,
    NotNormalized,
    NotSubcritical,
    OrderViolation,
    OverflowGuard,
    ParseError,
    PerturbationError,
    ScenarioError,
    ShiftAboveBoxEigenvalue,
    ShiftOutsideLambdaSet,
    SolverError,
    SolverNoConvergence,
    SpaceError,
    SpecDomainMismatch,
    SpectralError,
    SuiteDependencyUnmet,
    TailEmpty,
    UnknownPreset,
    UnknownRadius,
)

__all__ = [
    "ClabError",
    "DomainError",
    "NonIncreasingRadii",
    "NonPositiveMeasure",
    "UnknownRadius",
    "UnknownPreset",
    "AssemblyError",
    "NonPositiveConductance",
    "SpecDomainMismatch",
    "DriftTooStrong",
    "NonPositiveTransformFunction",
    "SolverError",
    "ShiftAboveBoxEigenvalue",
    "NonPositiveKernel",
    "ComplexPrincipalEigenvalue",
    "SolverNoConvergence",
    "DenseLimitExceeded",
    "OrderViolation",
    "BoxMismatch",
    "IdenticalShift",
    "SpaceError",
    "NonPositiveInput",
    "NotNormalized",
    "ExponentOutOfRange",
    "SpectralError",
    "DegenerateTopEigenvalue",
    "OverflowGuard",
    "NotContractive",
    "ShiftOutsideLambdaSet",
    "PerturbationError",
    "NotSubcritical",
    "TailEmpty",
    "ExclusionTooLarge",
    "ScenarioError",
    "ParseError",
    "SuiteDependencyUnmet",
    "EmptyDirectory",
    "ErrorClassifier",
    "ErrorSeverity",
    "ExitStatus",
]
