# latent-shift-lab/src/latent_shift_lab/resampler/subsample.py

import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import ConfigError, MissingClassError, ResampleError
from ..core.io import artifact_writer
from ..models import Dataset, MarginalSet, ResampleSpec
from ..scm.generator import discretize_labels
from ..scm.seeds import stream

logger = logging.getLogger(__name__)


class ResampleResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    dataset: Dataset
    indices: np.ndarray
    class_counts: list[list[int]]
    scales: list[int]


def as_classification(dataset: Dataset, n_classes: int | None = None) -> Dataset:
    """Quantile-bin the labels of a regression dataset; classification datasets pass through."""
    if dataset.task == "classification":
        return dataset
    if n_classes is None:
        raise ConfigError("resampling a regression dataset needs n_classes")
    labels = dataset.evaluation_labels()
    known = ~np.isnan(labels)
    classes = np.full_like(labels, np.nan)
    classes[known] = discretize_labels(labels[known], n_classes)
    y = np.where(np.isnan(dataset.y), np.nan, classes)
    return dataset.model_copy(update={
        "task": "classification", "n_classes": n_classes, "y": y,
        "y_true": classes if dataset.y_true is not None else None,
    })


def _labels(dataset: Dataset) -> np.ndarray:
    labels = dataset.evaluation_labels()
    if np.any(np.isnan(labels)):
        raise ConfigError("resampling needs a label for every sample (withheld target labels included)")
    return labels.astype(np.int64)


def class_counts(dataset: Dataset) -> list[list[int]]:
    labels = _labels(dataset)
    return [
        np.bincount(labels[dataset.domains == u], minlength=dataset.n_classes).astype(int).tolist()
        for u in dataset.domain_ids
    ]


def resample_spec_from_dataset(dataset: Dataset, target_kl: float, seed: int = 0) -> ResampleSpec:
    counts = class_counts(dataset)
    return ResampleSpec(K=len(counts), C=dataset.n_classes, target_kl=target_kl, available_counts=counts, seed=seed)


def domain_scale(p: np.ndarray, available: np.ndarray) -> int:
    """Largest N with floor(N * p_k) <= available_k for every class k."""
    n = int(np.min(np.ceil((available + 1) / p))) - 1
    while n > 0 and np.any(np.floor(n * p) > available):
        n -= 1
    while np.all(np.floor((n + 1) * p) <= available):
        n += 1
    return n


def subsample(dataset: Dataset, marginals: MarginalSet, seed: int) -> ResampleResult:
    """
    Keep floor(N_u * p_u(k)) samples of class k in domain u, drawn uniformly
    without replacement, with N_u as large as availability allows.

    A class is required in a domain when a full-size draw of that domain
    would need at least one sample of it.
    """
    labels = _labels(dataset)
    ids = dataset.domain_ids
    if marginals.K != len(ids) or marginals.C != dataset.n_classes:
        raise ResampleError(f"marginals are {marginals.K}x{marginals.C}, dataset has {len(ids)} domains and {dataset.n_classes} classes")

    kept, counts, scales = [], [], []
    for k, u in enumerate(ids):
        p = np.asarray(marginals.distributions[k])
        rows = np.flatnonzero(dataset.domains == u)
        available = np.bincount(labels[rows], minlength=dataset.n_classes)
        for c in np.flatnonzero(available == 0):
            if p[c] * rows.size >= 1.0:
                raise MissingClassError(u, int(c))

        n_u = domain_scale(p, available)
        per_class = np.floor(n_u * p).astype(np.int64)
        rng = stream(seed, "subsample", u)
        for c in range(dataset.n_classes):
            if per_class[c] > 0:
                pool = rows[labels[rows] == c]
                kept.append(rng.choice(pool, size=per_class[c], replace=False))
        counts.append(per_class.tolist())
        scales.append(n_u)
        logger.debug("domain %d: scale %d keeps %d of %d samples", u, n_u, per_class.sum(), rows.size)

    indices = np.sort(np.concatenate(kept)) if kept else np.array([], dtype=np.int64)
    logger.info("resampled %d of %d samples", indices.size, dataset.n_samples)
    return ResampleResult(dataset=dataset.subset(indices), indices=indices, class_counts=counts, scales=scales)


def save_marginals(path: str | Path, marginals: MarginalSet) -> Path:
    with artifact_writer(path) as handle:
        handle.write(marginals.model_dump_json(indent=1))
        handle.write("\n")
    return Path(path)
