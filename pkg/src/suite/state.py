from __future__ import annotations

import time
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..error import ErrorClassifier, ExitStatus
from ..reports.scenario import Scenario
from ..reports.writer import to_jsonable


class CheckResult(BaseModel):
    """Outcome of one executable invariant.

    Diagnostic checks are reported but never change the exit status.
    """

    name: str
    suite: str
    passed: bool
    value: Optional[Any] = None
    threshold: Optional[float] = None
    diagnostic: bool = False
    detail: Dict[str, Any] = Field(default_factory=dict)

    @property
    def gating(self) -> bool:
        return not self.diagnostic


class SuiteError(BaseModel):
    suite: str
    error_code: str
    message: str
    exit_status: int
    context: Dict[str, Any] = Field(default_factory=dict)


class SuiteState(BaseModel):
    scenario: Scenario
    requested: List[str] = Field(default_factory=list)
    completed: List[str] = Field(default_factory=list)
    skipped: Dict[str, str] = Field(default_factory=dict)
    # (suite, k, λ) entries whose shift is not below λ0^{(k)}
    skipped_entries: List[Dict[str, Any]] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)
    reports: Dict[str, Any] = Field(default_factory=dict)
    traces: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    errors: List[SuiteError] = Field(default_factory=list)
    error: Optional[str] = None
    output_dir: Optional[str] = None

    # Suite timing, kept out of the written reports
    timing: Dict[str, float] = Field(default_factory=dict)
    start_time: Optional[float] = None

    def start_timing(self) -> None:
        self.start_time = time.time()
        self.timing.clear()

    def record_timing(self, suite: str, duration: float) -> None:
        self.timing[suite] = duration

    def add_check(
        self,
        name: str,
        suite: str,
        passed: bool,
        value: Any = None,
        threshold: Optional[float] = None,
        diagnostic: bool = False,
        **detail: Any,
    ) -> CheckResult:
        result = CheckResult(
            name=name,
            suite=suite,
            passed=bool(passed),
            value=to_jsonable(value),
            threshold=threshold,
            diagnostic=diagnostic,
            detail=to_jsonable(detail),
        )
        self.checks.append(result)
        return result

    def record_error(self, suite: str, exc: Exception) -> SuiteError:
        classifier = ErrorClassifier()
        status, _ = classifier.classify(exc)
        entry = SuiteError(
            suite=suite,
            error_code=getattr(exc, "error_code", type(exc).__name__),
            message=classifier.get_user_message(exc),
            exit_status=status.value,
            context=dict(getattr(exc, "context", {}) or {}),
        )
        self.errors.append(entry)
        self.error = entry.message
        return entry

    @property
    def pending(self) -> List[str]:
        done = set(self.completed) | set(self.skipped) | {e.suite for e in self.errors}
        return [s for s in self.requested if s not in done]

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if c.gating and not c.passed]

    @property
    def exit_status(self) -> int:
        """2 for input errors, 1 for failed gated checks or numerical errors, else 0."""
        if any(e.exit_status == ExitStatus.USAGE_ERROR.value for e in self.errors):
            return ExitStatus.USAGE_ERROR.value
        if self.errors or self.failed_checks:
            return ExitStatus.INVARIANT_FAILURE.value
        return ExitStatus.PASSED.value

    @property
    def passed(self) -> bool:
        return self.exit_status == ExitStatus.PASSED.value

    def timing_summary(self) -> Dict[str, Any]:
        total = time.time() - self.start_time if self.start_time else None
        return {"suites": dict(self.timing), "total_duration": total}
