# latent-shift-lab/src/latent_shift_lab/core/io.py

import logging
import os
from contextlib import contextmanager
from pathlib import Path

from .errors import DataIOError

logger = logging.getLogger(__name__)


@contextmanager
def artifact_writer(path: str | Path, mode: str = "w"):
    """
    Context manager for writing an artifact atomically.
    Writes into a temporary sibling and renames it over `path` on success;
    the partial file is removed if the body raises.
    """
    target = Path(path)
    tmp = target.with_name(f".{target.name}.tmp")
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        handle = open(tmp, mode, encoding=None if "b" in mode else "utf-8", newline="" if "b" not in mode else None)
    except OSError as e:
        raise DataIOError(f"cannot open {target} for writing: {e}") from e

    try:
        yield handle
        handle.close()
        os.replace(tmp, target)
        logger.debug("wrote %s", target)
    except OSError as e:
        handle.close()
        tmp.unlink(missing_ok=True)
        raise DataIOError(f"failed writing {target}: {e}") from e
    except Exception:
        handle.close()
        tmp.unlink(missing_ok=True)
        raise


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataIOError(f"cannot read {path}: {e}") from e
