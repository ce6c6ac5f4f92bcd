# latent-shift-lab/src/latent_shift_lab/core/log.py

import logging
import sys

from .config import settings

_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Route library logs to standard error; standard output stays machine-readable."""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=_FORMAT,
        stream=sys.stderr,
        force=True,
    )
