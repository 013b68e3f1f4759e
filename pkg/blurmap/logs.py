"""Structured logging on stderr.

Subcommands print their results (dof=..., max_f=..., pairs=...) on stdout;
progress, stage timings and per-image errors go through these loggers to
stderr as JSON lines, so `blurmap eval ... > results.txt` stays parseable.
"""

import json
import logging
from datetime import datetime, timezone


class JSONFormatter(logging.Formatter):
    """One JSON object per record: UTC timestamp, level, logger name, message
    and the formatted traceback when the record carries one."""

    def format(self, record):
        log_obj = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            log_obj["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_obj)


def setup_logging(level: str = "INFO"):
    """Replaces any existing root handlers with a single JSON handler on stderr.

    `force=True` lets repeated CLI invocations in one process (tests, scripts)
    switch the level without stacking handlers.
    """
    handler = logging.StreamHandler()
    handler.setFormatter(JSONFormatter())
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        handlers=[handler],
        force=True,
    )
