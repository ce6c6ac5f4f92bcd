# latent-shift-lab/src/latent_shift_lab/models/train_config.py

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .vae_config import ModelConfig


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    epochs: int = Field(default=200, ge=0)
    batch_size: int = Field(default=256, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    preset: Literal["synthetic", "feature"] = "synthetic"
    eval_every: int = Field(default=10, ge=1)

    beta: Optional[float] = Field(default=None, ge=0.0)
    lam: Optional[float] = Field(default=None, ge=0.0, alias="lambda")
    gamma: Optional[float] = Field(default=None, ge=0.0)

    def apply_overrides(self, config: ModelConfig) -> ModelConfig:
        updates = {k: v for k, v in (("beta", self.beta), ("lam", self.lam), ("gamma", self.gamma)) if v is not None}
        if not updates:
            return config
        return ModelConfig(**{**config.model_dump(), **updates})
