"""Structured logging for the criticality workbench.

Disabled entirely with CLAB_DISABLE_OBSERVABILITY=true.
"""

from .logging import (
    ClabLogger,
    LoggingContext,
    TimedOperation,
    configure_logging,
    disable_logging,
    get_logger,
)

__all__ = [
    "ClabLogger",
    "LoggingContext",
    "TimedOperation",
    "configure_logging",
    "disable_logging",
    "get_logger",
]
