"""Logging setup. Records go to stderr; stdout is reserved for command output."""

from __future__ import annotations

import logging
import sys
import time
from contextlib import contextmanager
from typing import Any, Iterator

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_configured = False


def configure_logging(level: str | int = "INFO") -> None:
    global _configured
    if isinstance(level, str):
        numeric = logging.getLevelName(level.upper())
        if not isinstance(numeric, int):
            raise ValueError(f"unknown log level: {level}")
        level = numeric
    root = logging.getLogger()
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        # the exporter libraries are chatty at INFO
        logging.getLogger("azure").setLevel(logging.WARNING)
        logging.getLogger("opentelemetry").setLevel(logging.WARNING)
        _configured = True
    root.setLevel(level)


@contextmanager
def log_stage(logger: logging.Logger, stage: str, *, seed: int, config_hash: str, **extra: Any) -> Iterator[dict[str, Any]]:
    """Log begin/end records of one command stage.

    The yielded dict is merged into the end record, so callers can attach
    outcome fields (``passed``, ``n_paths`` ...).
    """
    outcome: dict[str, Any] = {}
    fields = " ".join(f"{key}={value}" for key, value in sorted(extra.items()))
    logger.info("stage=%s event=begin seed=%d config_hash=%s %s", stage, seed, config_hash[:12], fields)
    start = time.perf_counter()
    try:
        yield outcome
    finally:
        elapsed = time.perf_counter() - start
        tail = " ".join(f"{key}={value}" for key, value in sorted(outcome.items()))
        logger.info(
            "stage=%s event=end seed=%d config_hash=%s elapsed_s=%.3f %s",
            stage,
            seed,
            config_hash[:12],
            elapsed,
            tail,
        )
