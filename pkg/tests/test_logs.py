from __future__ import annotations

import logging
from collections.abc import Iterator

import pytest

from polyvem.logs import RunContextFilter, configure_logging, set_run_label


@pytest.fixture(autouse=True)
def _restore_level() -> Iterator[None]:
    yield
    configure_logging("WARNING", "-")


def _record(**extra: object) -> logging.LogRecord:
    record = logging.LogRecord("polyvem.assembly", logging.INFO, __file__, 1, "solved", None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_filter_stamps_missing_run_label() -> None:
    run_filter = RunContextFilter("beam-coarse")
    record = _record()

    assert run_filter.filter(record)
    assert record.run == "beam-coarse"


def test_filter_keeps_explicit_run_label() -> None:
    record = _record(run="explicit")

    RunContextFilter("other").filter(record)

    assert record.run == "explicit"


def test_configure_logging_installs_one_handler() -> None:
    logger = configure_logging("debug", "first")
    handlers = list(logger.handlers)
    configure_logging(logging.ERROR, "second")

    assert logger.handlers == handlers
    assert logger.level == logging.ERROR
    assert not logger.propagate


def test_set_run_label_keeps_level() -> None:
    logger = configure_logging("INFO", "before")
    set_run_label("after")

    assert logger.level == logging.INFO
    (run_filter,) = [f for h in logger.handlers for f in h.filters if isinstance(f, RunContextFilter)]
    assert run_filter.run_label == "after"
