# latent-shift-lab/src/latent_shift_lab/scm/csv_io.py

"""
CSV exchange format.

dataset:  domain,label,x0,...,x{d_x-1}    (empty label = unlabeled row)
latents:  domain,nc0,...,ns0,...,zc0,...,zs0,...,y_true   (same row order)
"""

import logging
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import pandas as pd

from ..core.config import settings
from ..core.errors import DataIOError
from ..core.io import artifact_writer
from ..models import Dataset, LatentTable

logger = logging.getLogger(__name__)


def latents_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.latents.csv")


def _format_label(value: float, task: str) -> str:
    if np.isnan(value):
        return ""
    if task == "classification":
        return str(int(value))
    return format(float(value), f".{settings.FLOAT_FORMAT_DIGITS}g")


def _write_frame(frame: pd.DataFrame, path: Path):
    with artifact_writer(path) as handle:
        frame.to_csv(handle, index=False, float_format=settings.float_format, lineterminator="\n")


def save_dataset(dataset: Dataset, path: str | Path) -> list[Path]:
    """Write the dataset CSV and, when ground truth exists, its latent sibling."""
    path = Path(path)
    columns = {
        "domain": dataset.domains.astype(np.int64),
        "label": [_format_label(v, dataset.task) for v in dataset.y],
    }
    for j in range(dataset.d_x):
        columns[f"x{j}"] = dataset.x[:, j]
    _write_frame(pd.DataFrame(columns), path)
    written = [path]

    if dataset.latents is not None or dataset.y_true is not None:
        latent_columns: dict = {"domain": dataset.domains.astype(np.int64)}
        if dataset.latents is not None:
            for prefix, block in (("nc", dataset.latents.n_c), ("ns", dataset.latents.n_s),
                                  ("zc", dataset.latents.z_c), ("zs", dataset.latents.z_s)):
                for j in range(block.shape[1]):
                    latent_columns[f"{prefix}{j}"] = block[:, j]
        truth = dataset.y_true if dataset.y_true is not None else dataset.y
        latent_columns["y_true"] = [_format_label(v, dataset.task) for v in truth]
        _write_frame(pd.DataFrame(latent_columns), latents_path(path))
        written.append(latents_path(path))

    logger.info("wrote %d rows to %s", dataset.n_samples, path)
    return written


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype={"label": str, "y_true": str}, keep_default_na=False, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataIOError(f"cannot read dataset CSV {path}: {e}") from e


def _parse_labels(values) -> np.ndarray:
    return np.array([float(v) if v != "" else np.nan for v in values], dtype=np.float64)


def _block(frame: pd.DataFrame, prefix: str) -> np.ndarray:
    cols = sorted((c for c in frame.columns if c.startswith(prefix) and c[len(prefix):].isdigit()),
                  key=lambda c: int(c[len(prefix):]))
    return frame[cols].to_numpy(dtype=np.float64)


def load_dataset(
    path: str | Path,
    task: Literal["regression", "classification"] = "regression",
    n_classes: Optional[int] = None,
) -> Dataset:
    """
    Read a dataset CSV (plus its latent sibling when present). The target
    domain is the one domain whose rows are all unlabeled.
    """
    path = Path(path)
    frame = _read_frame(path)
    if list(frame.columns[:2]) != ["domain", "label"]:
        raise DataIOError(f"{path}: header must start with 'domain,label', got {list(frame.columns[:2])}")

    domains = frame["domain"].to_numpy(dtype=np.int64)
    y = _parse_labels(frame["label"])
    x = _block(frame, "x")

    unlabeled = [int(u) for u in np.unique(domains) if np.all(np.isnan(y[domains == u]))]
    target = unlabeled[0] if len(unlabeled) == 1 else None

    y_true, latents = None, None
    sibling = latents_path(path)
    if sibling.exists():
        lat = _read_frame(sibling)
        if len(lat) != len(frame):
            raise DataIOError(f"{sibling} has {len(lat)} rows, dataset has {len(frame)}")
        if "y_true" in lat.columns:
            y_true = _parse_labels(lat["y_true"])
        if any(c.startswith("nc") for c in lat.columns):
            latents = LatentTable(n_c=_block(lat, "nc"), n_s=_block(lat, "ns"), z_c=_block(lat, "zc"), z_s=_block(lat, "zs"))

    if task == "classification" and n_classes is None:
        known = y_true if y_true is not None else y
        n_classes = int(np.nanmax(known)) + 1

    try:
        return Dataset(
            task=task, n_classes=n_classes, x=x, y=y, domains=domains,
            target_domain=target, y_true=y_true, latents=latents,
        )
    except ValueError as e:
        raise DataIOError(f"{path}: {e}") from e
