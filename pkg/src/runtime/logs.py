"""Logger setup shared by every module.

Messages go to stderr with the same ``[GAV]`` prefix the orchestrator uses, so the
Action log reads as one stream. Reports never go through the logger.
"""

from __future__ import annotations

import logging
import os
import sys

PREFIX = "[GAV]"
_ROOT = "gav"


def configure(verbose: bool = False) -> logging.Logger:
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(f"{PREFIX} %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
        root.propagate = False
    level = "DEBUG" if verbose else os.environ.get("GAV_LOG_LEVEL", "INFO").upper()
    root.setLevel(getattr(logging, level, logging.INFO))
    return root


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"{_ROOT}.{name}")
