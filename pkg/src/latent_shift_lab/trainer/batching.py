# latent-shift-lab/src/latent_shift_lab/trainer/batching.py

import numpy as np

from ..core.errors import ConfigError
from ..lcsvae import Batch, LatentDraws
from ..models import Dataset
from ..scm.seeds import derive_seed


def epoch_rng(seed: int, component: str, epoch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([derive_seed(seed, component), epoch]))


def step_rng(seed: int, epoch: int, step: int) -> np.random.Generator:
    """Reparameterization draws of one optimizer step, independent of how the run was resumed."""
    return np.random.default_rng(np.random.SeedSequence([derive_seed(seed, "draws"), epoch, step]))


def batch_indices(
    indices: np.ndarray,
    batch_size: int,
    seed: int,
    epoch: int,
    component: str = "batches",
) -> list[np.ndarray]:
    """Shuffle `indices` once per (seed, epoch) and cut it into batches; the short tail batch is kept."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise ConfigError("cannot batch an empty set of rows")
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
    order = indices[epoch_rng(seed, component, epoch).permutation(indices.size)]
    return [order[i:i + batch_size] for i in range(0, order.size, batch_size)]


def make_batch(dataset: Dataset, rows: np.ndarray) -> Batch:
    return Batch.from_arrays(dataset.x[rows], dataset.domains[rows], dataset.n_domains, dataset.y[rows])


def minibatches(dataset: Dataset, batch_size: int, seed: int, epoch: int) -> list[Batch]:
    """Deterministic partition of every row of `dataset` into batches for one epoch."""
    if dataset.n_samples == 0:
        raise ConfigError("cannot batch an empty dataset")
    smallest = min(dataset.per_domain_counts().values())
    if batch_size > smallest:
        raise ConfigError(f"batch_size {batch_size} exceeds the smallest domain ({smallest} samples)")
    return [make_batch(dataset, rows) for rows in batch_indices(np.arange(dataset.n_samples), batch_size, seed, epoch)]


def draws_for(rng: np.random.Generator, batch: Batch, d_c: int, d_s: int) -> LatentDraws:
    return LatentDraws.sample(rng, batch.size, d_c, d_s)
