# latent-shift-lab/src/latent_shift_lab/trainer/erm.py

import logging
import math
from typing import Optional

import numpy as np

from ..core.errors import ConfigError, NanLossError
from ..lcsvae import Mlp, mi_from_outputs
from ..models import Dataset, TrainConfig
from ..ndiff import Adam, Tensor, apply, backward
from ..scm.seeds import stream
from .batching import batch_indices

logger = logging.getLogger(__name__)

PRESET_SHAPES = {"synthetic": (3, 30), "feature": (2, 128)}


class ErmPredictor:
    """Supervised net on raw x, trained on pooled source rows only."""

    def __init__(self, net: Mlp, task: str, loss_trace: Optional[list[float]] = None):
        self.net = net
        self.task = task
        self.loss_trace = loss_trace or []

    def predict(self, x: np.ndarray, u: Optional[np.ndarray] = None) -> np.ndarray:
        """Same output convention as the VAE: probabilities (n x C) or means (n,). `u` is ignored."""
        if x.ndim != 2 or x.shape[1] != self.net.in_features:
            raise ConfigError(f"x must be n x {self.net.in_features}, got {x.shape}")
        frozen = Mlp(self.net.name, [Tensor(w.data) for w in self.net.weights], [Tensor(b.data) for b in self.net.biases])
        out = frozen(Tensor(x))
        if self.task == "classification":
            return apply("softmax_rows", [out]).data.copy()
        return out.data[:, 0].copy()


def train_erm(dataset: Dataset, train_config: TrainConfig) -> ErmPredictor:
    rows = dataset.source_indices() if dataset.target_domain is not None else np.flatnonzero(dataset.labeled_mask)
    if rows.size == 0:
        raise ConfigError("ERM needs labeled source data")
    layers, hidden = PRESET_SHAPES[train_config.preset]
    out_dim = dataset.n_classes if dataset.task == "classification" else 1
    net = Mlp.initialize("erm", Mlp.layer_sizes(dataset.d_x, out_dim, layers, hidden), stream(train_config.seed, "erm_init"))
    params = [t for _, t in net.named_parameters()]
    optimizer = Adam(params, lr=train_config.learning_rate)
    predictor = ErmPredictor(net, dataset.task)

    for epoch in range(train_config.epochs):
        batches = batch_indices(rows, min(train_config.batch_size, rows.size), train_config.seed, epoch, "erm")
        total = 0.0
        for step, batch in enumerate(batches):
            log_lik = mi_from_outputs(net(Tensor(dataset.x[batch])), dataset.y[batch], dataset.task)
            loss = apply("mul", [log_lik, -1.0])
            if not math.isfinite(loss.item()):
                raise NanLossError("erm", epoch, step)
            optimizer.zero_grad()
            grads = backward(loss, params)
            optimizer.step([grads[p] for p in params])
            total += loss.item()
        predictor.loss_trace.append(total / len(batches))
        logger.debug("erm epoch %d: loss=%.5f", epoch + 1, predictor.loss_trace[-1])

    return predictor
