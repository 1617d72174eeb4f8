"""Error classification and exit-status mapping."""

from __future__ import annotations

from enum import Enum
from typing import Union

from .core import (
    AssemblyError,
    ClabError,
    DomainError,
    PerturbationError,
    ScenarioError,
    SolverError,
    SpaceError,
    SpectralError,
)


class ErrorSeverity(Enum):
    """Error severity levels."""

    LOW = "low"  # diagnostic only
    MEDIUM = "medium"  # one suite entry lost
    HIGH = "high"  # invariant violated
    CRITICAL = "critical"  # scenario cannot run


class ExitStatus(Enum):
    """CLI exit contract."""

    PASSED = 0
    INVARIANT_FAILURE = 1
    USAGE_ERROR = 2


# Errors that mean "a theorem-level check failed" rather than "bad input".
_INVARIANT_CODES = {
    "DEGENERATE_TOP_EIGENVALUE",
    "NOT_CONTRACTIVE",
    "NON_POSITIVE_KERNEL",
    "COMPLEX_PRINCIPAL_EIGENVALUE",
    "SOLVER_NO_CONVERGENCE",
    "DRIFT_TOO_STRONG",
}


class ErrorClassifier:
    """Classifies errors and maps them to exit statuses."""

    def classify(
        self, error: Union[Exception, str]
    ) -> tuple[ExitStatus, ErrorSeverity]:
        """
        Classify an error.

        Args:
            error: Exception instance or error message string

        Returns:
            Tuple of (ExitStatus, ErrorSeverity)
        """
        if isinstance(error, ClabError):
            return self._classify_clab_error(error)

        message = str(error).lower()
        if "memory" in message:
            return ExitStatus.USAGE_ERROR, ErrorSeverity.CRITICAL
        # Unknown exceptions are treated as a failed run, not bad input.
        return ExitStatus.INVARIANT_FAILURE, ErrorSeverity.HIGH

    def _classify_clab_error(
        self, error: ClabError
    ) -> tuple[ExitStatus, ErrorSeverity]:
        if error.error_code in _INVARIANT_CODES:
            return ExitStatus.INVARIANT_FAILURE, ErrorSeverity.HIGH
        if isinstance(error, (ScenarioError, DomainError)):
            return ExitStatus.USAGE_ERROR, ErrorSeverity.CRITICAL
        if isinstance(error, (AssemblyError, SpaceError)):
            return ExitStatus.USAGE_ERROR, ErrorSeverity.HIGH
        if isinstance(error, (SolverError, SpectralError, PerturbationError)):
            return ExitStatus.INVARIANT_FAILURE, ErrorSeverity.MEDIUM
        return ExitStatus.INVARIANT_FAILURE, ErrorSeverity.MEDIUM

    def exit_code(self, error: Union[Exception, str]) -> int:
        """Exit code for an error that aborted a run."""
        status, _ = self.classify(error)
        return status.value

    def get_user_message(self, error: Union[Exception, str]) -> str:
        """Short human-readable message for the CLI panel."""
        if isinstance(error, ClabError):
            scenario = error.context.get("scenario")
            prefix = f"{scenario}: " if scenario else ""
            return f"{prefix}{error.message}"
        return str(error)
