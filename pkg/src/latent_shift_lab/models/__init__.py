# latent-shift-lab/src/latent_shift_lab/models/__init__.py

"""
Domain types shared by every module, re-exported for convenience:

from latent_shift_lab.models import ScmConfig, Dataset, ModelConfig
"""

from .adam_state import AdamState
from .domain_spec import DomainSpec
from .experiment_config import ExperimentConfig, ModelOverrides, PathsConfig, ResampleOptions
from .history import History, HistoryRecord
from .metric_report import MatchedPair, MetricReport
from .resample import MarginalSet, ResampleSpec
from .samples import Dataset, LabeledSample, LatentSample, LatentTable
from .scm_config import ScmConfig
from .train_config import TrainConfig
from .vae_config import ModelConfig

__all__ = [
    "AdamState",
    "Dataset",
    "DomainSpec",
    "ExperimentConfig",
    "History",
    "HistoryRecord",
    "LabeledSample",
    "LatentSample",
    "LatentTable",
    "MarginalSet",
    "MatchedPair",
    "MetricReport",
    "ModelConfig",
    "ModelOverrides",
    "PathsConfig",
    "ResampleOptions",
    "ResampleSpec",
    "ScmConfig",
    "TrainConfig",
]
