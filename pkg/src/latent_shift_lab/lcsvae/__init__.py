from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .diagnostics import loss_gradchecks
from .losses import (
    EncodedBatch,
    ObjectiveTerms,
    encode_batch,
    entropy_from_logits,
    kl_gaussian,
    kl_gaussian_rows,
    loss_elbo,
    loss_entropy,
    loss_mi,
    mi_from_outputs,
    total_objective,
)
from .model import Batch, GaussianParams, LabelScaling, LatentDraws, LcsVae, VaeParams, reparameterize
from .networks import Mlp

__all__ = [
    "Batch",
    "Checkpoint",
    "EncodedBatch",
    "GaussianParams",
    "LabelScaling",
    "LatentDraws",
    "LcsVae",
    "Mlp",
    "ObjectiveTerms",
    "VaeParams",
    "encode_batch",
    "entropy_from_logits",
    "kl_gaussian",
    "kl_gaussian_rows",
    "load_checkpoint",
    "loss_elbo",
    "loss_entropy",
    "loss_gradchecks",
    "loss_mi",
    "mi_from_outputs",
    "reparameterize",
    "save_checkpoint",
    "total_objective",
]
