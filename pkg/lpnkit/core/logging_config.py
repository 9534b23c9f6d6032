"""
Logging setup for the toolkit.

Modules log through ``logging.getLogger(__name__)``; the CLI calls
``configure_logging`` once at startup.
"""

import logging
import sys

from lpnkit.core.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """
    Configure the root ``lpnkit`` logger.

    Args:
        level: Log level name; defaults to ``settings.LOG_LEVEL``
    """
    root = logging.getLogger("lpnkit")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.propagate = False
