"""Structured logging configuration for sphere-cr."""

import logging
import sys
from datetime import datetime, timezone
from typing import Any

import structlog
from structlog.types import Processor


def add_app_context(
    logger: logging.Logger, method_name: str, event_dict: dict[str, Any]
) -> dict[str, Any]:
    """Add application context to log entries."""
    event_dict["app"] = "sphere_cr"
    event_dict["version"] = "0.1.0"
    return event_dict


def add_timestamp(
    logger: logging.Logger, method_name: str, event_dict: dict[str, Any]
) -> dict[str, Any]:
    """Add ISO timestamp to log entries."""
    event_dict["timestamp"] = datetime.now(timezone.utc).isoformat()
    return event_dict


def configure_logging(
    log_level: str = "WARNING",
    json_output: bool = False,
    development: bool = True,
) -> None:
    """Configure structured logging.

    Logs always go to stderr; stdout belongs to reports.

    Args:
        log_level: Minimum log level (DEBUG, INFO, WARNING, ERROR)
        json_output: Render JSON lines instead of console output
        development: Colourise console output when stderr is a terminal
    """
    shared_processors: list[Processor] = [
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        add_timestamp,
        add_app_context,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
    ]

    if json_output:
        renderer: Processor = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=development and sys.stderr.isatty())

    structlog.configure(
        processors=shared_processors + [
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            processor=renderer,
            foreign_pre_chain=shared_processors,
        )
    )

    root_logger = logging.getLogger()
    root_logger.handlers = [handler]
    root_logger.setLevel(getattr(logging, log_level.upper()))


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """Get a structured logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Bound structlog logger
    """
    return structlog.get_logger(name)


class CheckLogger:
    """Specialized logger for verification runs."""

    def __init__(self, seed: int | None = None, suite: str | None = None):
        """Initialize check logger.

        Args:
            seed: RNG seed of the run, for correlation
            suite: Suite label for context
        """
        self._logger = get_logger("sphere_cr.verify")
        self._context: dict[str, Any] = {}
        if seed is not None:
            self._context["seed"] = seed
        if suite:
            self._context["suite"] = suite

    def check_started(self, name: str) -> None:
        """Log start of a check."""
        self._logger.debug("check_started", check=name, **self._context)

    def check_completed(
        self,
        name: str,
        status: str,
        metric: float | None,
        tolerance: float,
        duration_ms: float,
    ) -> None:
        """Log completion of a check."""
        level = "debug" if status == "pass" else "info"
        getattr(self._logger, level)(
            "check_completed",
            check=name,
            status=status,
            metric=metric,
            tolerance=tolerance,
            duration_ms=round(duration_ms, 2),
            **self._context,
        )

    def check_error(self, name: str, error: Exception) -> None:
        """Log a check that raised instead of producing a metric."""
        self._logger.warning(
            "check_error",
            check=name,
            error_type=type(error).__name__,
            error_message=str(error),
            **self._context,
        )

    def points_skipped(self, name: str, skipped: int, reason: str) -> None:
        """Log grid points excluded from a check."""
        self._logger.info(
            "points_skipped",
            check=name,
            skipped=skipped,
            reason=reason,
            **self._context,
        )

    def suite_completed(self, checks: int, failed: int, wall_time_ms: float) -> None:
        """Log suite summary."""
        self._logger.info(
            "suite_completed",
            checks=checks,
            failed=failed,
            wall_time_ms=round(wall_time_ms, 2),
            **self._context,
        )
