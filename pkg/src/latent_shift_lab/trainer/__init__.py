from .batching import batch_indices, minibatches
from .erm import ErmPredictor, train_erm
from .loop import build_model_config, save_history, train

__all__ = [
    "ErmPredictor",
    "batch_indices",
    "build_model_config",
    "minibatches",
    "save_history",
    "train",
    "train_erm",
]
