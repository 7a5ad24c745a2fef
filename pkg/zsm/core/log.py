# zsm/core/log.py
import logging
from typing import Optional

from zsm.core.config import get_settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Attach a single stream handler to the ``zsm`` logger tree.

    Args:
        level: Level name; defaults to the ZSM_LOG setting.

    Returns:
        logging.Logger: The configured package logger.
    """
    name = (level or get_settings().LOG).upper()
    resolved = logging.getLevelName(name)
    if not isinstance(resolved, int):
        raise ValueError(f"Unknown log level: {name}")

    root = logging.getLogger("zsm")
    root.setLevel(resolved)
    if not any(getattr(h, "_zsm", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._zsm = True
        root.addHandler(handler)
    return root
