"""Central logging configuration."""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional


LOG_FILE_NAME = "reglab.log"
LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(log_level: str, base_log_dir: Optional[Path] = None) -> None:
    """Console logging on stderr, plus ``reglab.log`` when a directory is given."""
    log_level_value = getattr(logging, log_level.upper(), logging.INFO)
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level_value)
    console_handler.setFormatter(formatter)

    root = logging.getLogger()
    root.setLevel(log_level_value)
    for handler in root.handlers:
        handler.close()
    root.handlers.clear()
    root.addHandler(console_handler)

    if base_log_dir is not None:
        base_log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(base_log_dir / LOG_FILE_NAME, encoding="utf-8")
        file_handler.setLevel(log_level_value)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
