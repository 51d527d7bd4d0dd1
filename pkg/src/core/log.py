import logging
from typing import Optional, Union

from core.config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: Optional[Union[str, int]] = None) -> None:
    """Configure the root logger with a single stderr handler.

    Stdout is reserved for machine-readable output, so the handler always
    writes to stderr.
    """
    root = logging.getLogger()
    root.handlers.clear()

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)

    if level is None:
        level = settings.MK_LOG_LEVEL
    if isinstance(level, str):
        level = level.upper()
    root.setLevel(level)
