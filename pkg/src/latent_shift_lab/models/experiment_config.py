# latent-shift-lab/src/latent_shift_lab/models/experiment_config.py

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..core.constants import SOLVER_MAX_ITERATIONS
from .scm_config import ScmConfig
from .train_config import TrainConfig
from .vae_config import Ablation, EntropyMode


class ModelOverrides(BaseModel):
    """Model settings read from an experiment file; dimensions default to the dataset's."""
    model_config = ConfigDict(extra="forbid")

    d_c: Optional[int] = Field(default=None, ge=1)
    d_s: Optional[int] = Field(default=None, ge=1)
    hidden_units: Optional[int] = Field(default=None, ge=1)
    layers: Optional[int] = Field(default=None, ge=1)
    entropy_mode: EntropyMode = "penalty"
    ablation: Optional[Ablation] = None


class ResampleOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    target_kl: float = Field(ge=0.0)
    n_classes: Optional[int] = Field(default=None, ge=2)
    max_iterations: int = Field(default=SOLVER_MAX_ITERATIONS, ge=1)


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset: Optional[str] = None
    checkpoint: Optional[str] = None
    out_dir: Optional[str] = None


class ExperimentConfig(BaseModel):
    """One JSON document describing a reproducible experiment."""
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    task: Literal["regression", "classification"] = "regression"
    n_classes: Optional[int] = Field(default=None, ge=2)
    scm: Optional[ScmConfig] = None
    train: TrainConfig = Field(default_factory=TrainConfig)
    model: ModelOverrides = Field(default_factory=ModelOverrides)
    resample: Optional[ResampleOptions] = None
    paths: PathsConfig = Field(default_factory=PathsConfig)

    def with_seed(self, seed: Optional[int]) -> "ExperimentConfig":
        """Propagate one root seed into every seeded section."""
        seed = self.seed if seed is None else seed
        if seed is None:
            return self
        update: dict = {"seed": seed, "train": self.train.model_copy(update={"seed": seed})}
        if self.scm is not None:
            update["scm"] = self.scm.model_copy(update={"seed": seed})
        return self.model_copy(update=update)
