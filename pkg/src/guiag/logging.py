"""Logging configuration for the package.

Records go to the console and to a rotating ``guiag.log`` under ``$GUIAG_LOG_DIR`` (``logs`` when unset).
"""

import logging
import logging.handlers
import os
from pathlib import Path

MORE_INFO = 15
logging.addLevelName(MORE_INFO, "MORE_INFO")

# synthesis and episodes run on worker threads
LOG_FORMAT = "%(asctime)s|%(levelname)s|%(threadName)s: %(message)s"


def _build_logger() -> logging.Logger:
  package_logger = logging.getLogger("guiag")
  package_logger.setLevel(MORE_INFO)
  if package_logger.handlers:
    return package_logger

  log_file = Path(os.environ.get("GUIAG_LOG_DIR", "logs"), "guiag.log")
  log_file.parent.mkdir(parents=True, exist_ok=True)
  formatter = logging.Formatter(LOG_FORMAT)
  handlers: list[logging.Handler] = [
    logging.StreamHandler(),
    # max 100 files, each 10MB
    logging.handlers.RotatingFileHandler(log_file, maxBytes=10485760, backupCount=100, encoding="utf-8"),
  ]
  for handler in handlers:
    handler.setLevel(MORE_INFO)
    handler.setFormatter(formatter)
    package_logger.addHandler(handler)
  return package_logger


logger = _build_logger()


def get_logger() -> logging.Logger:
  """Return the shared package logger."""
  return logger


def set_verbosity(level: int | str) -> None:
  """Change the level of the package logger and all of its handlers.

  Args:
    level: A level number or name, ``"MORE_INFO"`` included.
  """
  logger.setLevel(level)
  for handler in logger.handlers:
    handler.setLevel(level)
