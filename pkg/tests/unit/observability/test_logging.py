"""Test suite for structured logging."""

import json
import logging
import os
from unittest.mock import MagicMock, patch

from src.observability import logging as clab_logging
from src.observability.logging import (
    RUN_ID_CONTEXT,
    SCENARIO_CONTEXT,
    SUITE_CONTEXT,
    ClabLogger,
    LoggingContext,
    TimedOperation,
    disable_logging,
    get_logger,
)


class TestClabLogger:
    """Test cases for structured logging functionality."""

    def test_logger_initialization_enabled(self):
        """Test logger initialization when enabled."""
        with patch.dict(os.environ, {"CLAB_DISABLE_OBSERVABILITY": "false"}):
            assert ClabLogger().enabled is True

    def test_logger_initialization_disabled(self):
        """Test logger initialization when disabled."""
        with patch.dict(os.environ, {"CLAB_DISABLE_OBSERVABILITY": "true"}):
            assert ClabLogger().enabled is False

    def test_disabled_logger_is_silent(self, caplog):
        logger = ClabLogger(enabled=False)
        with caplog.at_level(logging.DEBUG):
            logger.log_check("adjoint_defect", passed=False, value=1.0)
        assert caplog.records == []

    @patch("src.observability.logging.STRUCTLOG_AVAILABLE", False)
    def test_fallback_writes_json_lines(self, caplog):
        """Without structlog, events are JSON on the stdlib logger."""
        logger = ClabLogger(enabled=True)
        with caplog.at_level(logging.INFO, logger="clab"):
            logger.log_check("adjoint_defect", passed=False, value=2e-3, threshold=1e-12)

        record = caplog.records[-1]
        assert record.levelno == logging.WARNING
        data = json.loads(record.getMessage())
        assert data["event"] == "check"
        assert data["name"] == "adjoint_defect"
        assert data["passed"] is False
        assert data["component"] == "clab"

    @patch("src.observability.logging.STRUCTLOG_AVAILABLE", False)
    def test_context_is_attached(self, caplog):
        logger = ClabLogger(enabled=True)
        with caplog.at_level(logging.INFO, logger="clab"):
            with LoggingContext(scenario="path3", suite="norms", run_id="run-1"):
                logger.log_suite("norms", "completed", duration=0.5)

        data = json.loads(caplog.records[-1].getMessage())
        assert data["scenario"] == "path3"
        assert data["suite"] == "norms"
        assert data["run_id"] == "run-1"
        assert data["status"] == "completed"

    def test_structlog_methods_are_called(self):
        logger = ClabLogger(enabled=True)
        logger.logger = MagicMock()
        logger.log_scenario("z3", exit_status=0, duration=1.5)
        logger.logger.info.assert_called_once()
        args, kwargs = logger.logger.info.call_args
        assert args == ("scenario",)
        assert kwargs["exit_status"] == 0

    def test_failed_suite_logs_error(self):
        logger = ClabLogger(enabled=True)
        logger.logger = MagicMock()
        logger.log_suite("spectrum", "failed", error="degenerate top eigenvalue")
        logger.logger.error.assert_called_once()

    def test_logging_failure_is_contained(self, caplog):
        logger = ClabLogger(enabled=True)
        logger.logger = MagicMock()
        logger.logger.debug.side_effect = RuntimeError("sink closed")
        with caplog.at_level(logging.ERROR, logger="clab.fallback"):
            logger.log_solve("lu", radius=4, n=81)
        assert "Structured logging failed" in caplog.text


class TestLoggingContext:
    """Test context variable handling."""

    def test_context_is_restored(self):
        assert SCENARIO_CONTEXT.get() is None
        with LoggingContext(scenario="z2", suite="classify") as ctx:
            assert SCENARIO_CONTEXT.get() == "z2"
            assert SUITE_CONTEXT.get() == "classify"
            assert RUN_ID_CONTEXT.get() == ctx.run_id
        assert SCENARIO_CONTEXT.get() is None
        assert SUITE_CONTEXT.get() is None

    def test_nested_contexts_share_run_id(self):
        with LoggingContext(scenario="z2") as outer:
            with LoggingContext(suite="norms") as inner:
                assert inner.run_id == outer.run_id
                assert SCENARIO_CONTEXT.get() == "z2"


class TestTimedOperation:
    def test_duration_is_logged(self):
        logger = MagicMock()
        with TimedOperation(logger, "assemble", radius=3) as timer:
            pass
        assert timer.duration >= 0
        kwargs = logger.log_performance_metric.call_args.kwargs
        assert kwargs["operation"] == "assemble"
        assert kwargs["resource_usage"]["success"] is True
        assert kwargs["resource_usage"]["radius"] == 3


class TestGlobalLogger:
    def test_disable_logging(self):
        disable_logging()
        assert get_logger().enabled is False

    def test_get_logger_is_cached(self):
        with patch.object(clab_logging, "_global_logger", None):
            with patch.dict(os.environ, {"CLAB_DISABLE_OBSERVABILITY": "true"}):
                first = get_logger()
                assert get_logger() is first
