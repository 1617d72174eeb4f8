"""Core error classes for the criticality workbench."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Callable, Dict, Optional


class ClabError(Exception):
    """Base exception with error context for workbench operations."""

    def __init__(
        self, message: str, error_code: str, context: Optional[Dict[str, Any]] = None
    ) -> None:
        self.message = message
        self.error_code = error_code
        self.context = context or {}
        self.timestamp = datetime.now(timezone.utc)
        super().__init__(message)

    def __str__(self) -> str:
        return f"[{self.error_code}] {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for logging and reports."""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "context": self.context,
            "timestamp": self.timestamp.isoformat(),
            "type": self.__class__.__name__,
        }

    def with_context(self, **extra: Any) -> "ClabError":
        """Attach more context (e.g. the scenario name) and return self."""
        self.context.update(extra)
        return self


def _coded(code: str) -> Callable[..., None]:
    """Build a ClabError subclass initializer with a fixed error code."""

    def __init__(
        self: ClabError, message: str, context: Optional[Dict[str, Any]] = None
    ) -> None:
        ClabError.__init__(self, message, code, context)

    return __init__


# lattice_domain


class DomainError(ClabError):
    """Invalid exhaustion or field description."""


class NonIncreasingRadii(DomainError):
    __init__ = _coded("NON_INCREASING_RADII")


class NonPositiveMeasure(DomainError):
    __init__ = _coded("NON_POSITIVE_MEASURE")


class UnknownRadius(DomainError):
    __init__ = _coded("UNKNOWN_RADIUS")


class UnknownPreset(DomainError):
    __init__ = _coded("UNKNOWN_PRESET")


# operator_assembly


class AssemblyError(ClabError):
    """Operator assembly failures."""


class NonPositiveConductance(AssemblyError):
    __init__ = _coded("NON_POSITIVE_CONDUCTANCE")


class SpecDomainMismatch(AssemblyError):
    __init__ = _coded("SPEC_DOMAIN_MISMATCH")


class DriftTooStrong(AssemblyError):
    __init__ = _coded("DRIFT_TOO_STRONG")


class NonPositiveTransformFunction(AssemblyError):
    __init__ = _coded("NON_POSITIVE_TRANSFORM_FUNCTION")


# green_core


class SolverError(ClabError):
    """Linear-algebra level failures."""


class ShiftAboveBoxEigenvalue(SolverError):
    __init__ = _coded("SHIFT_ABOVE_BOX_EIGENVALUE")


class NonPositiveKernel(SolverError):
    __init__ = _coded("NON_POSITIVE_KERNEL")


class ComplexPrincipalEigenvalue(SolverError):
    __init__ = _coded("COMPLEX_PRINCIPAL_EIGENVALUE")


class SolverNoConvergence(SolverError):
    __init__ = _coded("SOLVER_NO_CONVERGENCE")


class DenseLimitExceeded(SolverError):
    __init__ = _coded("DENSE_LIMIT_EXCEEDED")


class OrderViolation(SolverError):
    __init__ = _coded("ORDER_VIOLATION")


class BoxMismatch(SolverError):
    __init__ = _coded("BOX_MISMATCH")


class IdenticalShift(SolverError):
    __init__ = _coded("IDENTICAL_SHIFT")


# weighted_spaces


class SpaceError(ClabError):
    """Weighted space construction and evaluation failures."""


class NonPositiveInput(SpaceError):
    __init__ = _coded("NON_POSITIVE_INPUT")


class NotNormalized(SpaceError):
    __init__ = _coded("NOT_NORMALIZED")


class ExponentOutOfRange(SpaceError):
    __init__ = _coded("EXPONENT_OUT_OF_RANGE")


# spectral


class SpectralError(ClabError):
    """Spectral and semigroup check failures."""


class DegenerateTopEigenvalue(SpectralError):
    __init__ = _coded("DEGENERATE_TOP_EIGENVALUE")


class OverflowGuard(SpectralError):
    __init__ = _coded("OVERFLOW_GUARD")


class NotContractive(SpectralError):
    __init__ = _coded("NOT_CONTRACTIVE")


class ShiftOutsideLambdaSet(SpectralError):
    __init__ = _coded("SHIFT_OUTSIDE_LAMBDA_SET")


# perturbation


class PerturbationError(ClabError):
    """Small/semismall profile failures."""


class NotSubcritical(PerturbationError):
    __init__ = _coded("NOT_SUBCRITICAL")


class TailEmpty(PerturbationError):
    __init__ = _coded("TAIL_EMPTY")


class ExclusionTooLarge(PerturbationError):
    __init__ = _coded("EXCLUSION_TOO_LARGE")


# cli_reports


class ScenarioError(ClabError):
    """Scenario file and suite orchestration failures."""


class ParseError(ScenarioError):
    """Scenario file could not be parsed; carries line/column when known."""

    def __init__(
        self,
        message: str,
        context: Optional[Dict[str, Any]] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        super().__init__(message, "PARSE_ERROR", context)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line is not None:
            return f"[{self.error_code}] line {self.line}, column {self.column}: {self.message}"
        return super().__str__()


class SuiteDependencyUnmet(ScenarioError):
    __init__ = _coded("SUITE_DEPENDENCY_UNMET")


class EmptyDirectory(ScenarioError):
    __init__ = _coded("EMPTY_DIRECTORY")
