"""Logging helpers that stamp polyvem records with the current run label."""

from __future__ import annotations

import logging
import sys
from typing import Optional

_LOGGER_NAME = "polyvem"
_FORMAT = "%(levelname)s %(name)s [%(run)s] %(message)s"


class RunContextFilter(logging.Filter):
    """Attach a ``run`` attribute to every record passing through the handler."""

    def __init__(self, run_label: str = "-") -> None:
        super().__init__()
        self.run_label = run_label

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run"):
            record.run = self.run_label
        return True


_handler: Optional[logging.Handler] = None
_filter: Optional[RunContextFilter] = None


def configure_logging(level: str | int = "WARNING", run_label: str | None = None) -> logging.Logger:
    """Install (or update) the single stream handler on the ``polyvem`` logger."""

    global _handler, _filter

    logger = logging.getLogger(_LOGGER_NAME)
    if _handler is None:
        _filter = RunContextFilter()
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter(_FORMAT))
        _handler.addFilter(_filter)
        logger.addHandler(_handler)
        logger.propagate = False
    else:
        _handler.stream = sys.stderr

    if run_label is not None and _filter is not None:
        _filter.run_label = run_label

    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    logger.setLevel(level)
    return logger


def set_run_label(run_label: str) -> None:
    """Relabel records without touching the handler or level."""

    if _filter is None:
        configure_logging(logging.getLogger(_LOGGER_NAME).level or "WARNING", run_label)
        return
    _filter.run_label = run_label


__all__ = ["RunContextFilter", "configure_logging", "set_run_label"]
