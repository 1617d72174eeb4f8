"""Structured logging with scenario/suite correlation.

Every solve, invariant check and suite step is emitted as a structured event.
Can be disabled via the CLAB_DISABLE_OBSERVABILITY environment variable.
"""

import json
import logging
import os
import time
import uuid
from contextvars import ContextVar
from typing import Any, Dict, List, Optional

# Optional dependency on structlog for enhanced logging
try:
    import structlog

    STRUCTLOG_AVAILABLE = True
except ImportError:
    STRUCTLOG_AVAILABLE = False

logger = logging.getLogger(__name__)

# Context variables for run correlation
RUN_ID_CONTEXT: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
SCENARIO_CONTEXT: ContextVar[Optional[str]] = ContextVar("scenario", default=None)
SUITE_CONTEXT: ContextVar[Optional[str]] = ContextVar("suite", default=None)


def configure_logging(level: str = "WARNING", json_output: bool = False) -> None:
    """Configure stdlib logging and structlog processors once per process."""
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=numeric_level, format="%(message)s")
    if not STRUCTLOG_AVAILABLE:
        return
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if json_output
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        cache_logger_on_first_use=False,
    )


class ClabLogger:
    """Structured logger for solver, check and suite events.

    Falls back to JSON lines on the stdlib logger when structlog is missing.
    """

    def __init__(self, enabled: Optional[bool] = None) -> None:
        if enabled is None:
            self.enabled = (
                not os.getenv("CLAB_DISABLE_OBSERVABILITY", "false").lower() == "true"
            )
        else:
            self.enabled = enabled

        if not self.enabled:
            return

        if STRUCTLOG_AVAILABLE:
            self.logger = structlog.get_logger("clab")
        else:
            self.logger = logging.getLogger("clab")

    def _get_base_context(self) -> Dict[str, Any]:
        context: Dict[str, Any] = {"component": "clab"}
        for key, var in (
            ("run_id", RUN_ID_CONTEXT),
            ("scenario", SCENARIO_CONTEXT),
            ("suite", SUITE_CONTEXT),
        ):
            value = var.get()
            if value:
                context[key] = value
        return context

    def _log_structured(self, level: str, event: str, **kwargs: Any) -> None:
        """Log with structured format."""
        if not self.enabled:
            return

        try:
            context = self._get_base_context()
            context.update(kwargs)

            if STRUCTLOG_AVAILABLE:
                log_method = getattr(self.logger, level.lower())
                log_method(event, **context)
            else:
                log_data = {"event": event, **context}
                numeric_level = getattr(logging, level.upper())
                self.logger.log(numeric_level, json.dumps(log_data, default=str))

        except Exception as e:
            basic_logger = logging.getLogger("clab.fallback")
            basic_logger.error(
                f"Structured logging failed: {e}, original event: {event}"
            )

    def log_solve(
        self,
        kind: str,
        radius: Optional[int],
        n: int,
        shift: Optional[float] = None,
        iterations: Optional[int] = None,
        seconds: Optional[float] = None,
    ) -> None:
        """Log a linear solve or eigen-solve."""
        self._log_structured(
            "DEBUG",
            "solve",
            kind=kind,
            radius=radius,
            n=n,
            shift=shift,
            iterations=iterations,
            seconds=seconds,
        )

    def log_check(
        self,
        name: str,
        passed: bool,
        value: Optional[float] = None,
        threshold: Optional[float] = None,
        diagnostic: bool = False,
    ) -> None:
        """Log the outcome of one invariant check."""
        level = "INFO" if passed or diagnostic else "WARNING"
        self._log_structured(
            level,
            "check",
            name=name,
            passed=passed,
            value=value,
            threshold=threshold,
            diagnostic=diagnostic,
        )

    def log_suite(
        self,
        name: str,
        status: str,
        duration: Optional[float] = None,
        error: Optional[str] = None,
    ) -> None:
        """Log a suite node execution."""
        self._log_structured(
            "INFO" if error is None else "ERROR",
            "suite",
            name=name,
            status=status,
            duration=duration,
            error=error,
        )

    def log_scenario(self, name: str, exit_status: int, duration: float) -> None:
        """Log the end of a scenario run."""
        self._log_structured(
            "INFO",
            "scenario",
            name=name,
            exit_status=exit_status,
            duration=duration,
        )

    def log_performance_metric(
        self,
        operation: str,
        duration: float,
        resource_usage: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Log performance metrics."""
        context = {"operation": operation, "duration": duration}
        if resource_usage:
            context.update(resource_usage)

        self._log_structured("DEBUG", "performance_metric", **context)


class LoggingContext:
    """Context manager for setting scenario/suite correlation."""

    def __init__(
        self,
        scenario: Optional[str] = None,
        suite: Optional[str] = None,
        run_id: Optional[str] = None,
    ) -> None:
        self.run_id = run_id or RUN_ID_CONTEXT.get() or str(uuid.uuid4())
        self.scenario = scenario
        self.suite = suite
        self.tokens: List[Any] = []

    def __enter__(self) -> "LoggingContext":
        self.tokens.append(RUN_ID_CONTEXT.set(self.run_id))
        if self.scenario:
            self.tokens.append(SCENARIO_CONTEXT.set(self.scenario))
        if self.suite:
            self.tokens.append(SUITE_CONTEXT.set(self.suite))
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        for token in reversed(self.tokens):
            token.var.reset(token)


class TimedOperation:
    """Context manager for timing operations with automatic logging."""

    def __init__(self, logger: ClabLogger, operation: str, **context: Any) -> None:
        self.logger = logger
        self.operation = operation
        self.context = context
        self.start_time: Optional[float] = None
        self.duration = 0.0

    def __enter__(self) -> "TimedOperation":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        if self.start_time is not None:
            self.duration = time.perf_counter() - self.start_time
            success = exc_type is None
            error = str(exc_val) if exc_val else None

            self.logger.log_performance_metric(
                operation=self.operation,
                duration=self.duration,
                resource_usage={"success": success, "error": error, **self.context},
            )


_global_logger: Optional[ClabLogger] = None


def get_logger() -> ClabLogger:
    """Get the global logger instance, initializing if needed."""
    global _global_logger
    if _global_logger is None:
        _global_logger = ClabLogger()
    return _global_logger


def disable_logging() -> None:
    """Disable structured logging globally."""
    global _global_logger
    _global_logger = ClabLogger(enabled=False)
