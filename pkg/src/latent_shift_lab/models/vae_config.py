# latent-shift-lab/src/latent_shift_lab/models/vae_config.py

import logging
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

EntropyMode = Literal["penalty", "literal"]
Ablation = Literal["beta1", "no_entropy"]


class ModelConfig(BaseModel):
    """Dimensions, network shapes and objective weights of the domain-conditioned VAE."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    d_x: int = Field(ge=1)
    d_c: int = Field(ge=1)
    d_s: int = Field(ge=1)
    n_domains: int = Field(ge=2)
    task: Literal["regression", "classification"] = "regression"
    n_classes: Optional[int] = Field(default=None, ge=2)

    # Number of weight layers per network (a 3-layer net has two hidden layers).
    encoder_layers: int = Field(default=3, ge=1)
    decoder_layers: int = Field(default=3, ge=1)
    prior_layers: int = Field(default=3, ge=1)
    classifier_layers: int = Field(default=3, ge=1)
    hidden_units: int = Field(default=30, ge=1)

    beta: float = Field(default=1.0, ge=0.0)
    lam: float = Field(default=1e-2, ge=0.0, alias="lambda")
    gamma: float = Field(default=0.0, ge=0.0)
    entropy_mode: EntropyMode = "penalty"

    @model_validator(mode="after")
    def check_task(self):
        if self.task == "classification" and self.n_classes is None:
            raise ValueError("classification needs n_classes")
        if self.task == "regression" and self.gamma > 0:
            logger.warning("entropy term is undefined for regression; forcing gamma=0 (was %s)", self.gamma)
            self.gamma = 0.0
        return self

    @property
    def latent_dim(self) -> int:
        return self.d_c + self.d_s

    @property
    def output_dim(self) -> int:
        return 1 if self.task == "regression" else self.n_classes

    @classmethod
    def synthetic(cls, **values) -> "ModelConfig":
        """3-layer, 30-unit networks with beta=1, gamma=0, lambda=1e-2."""
        defaults = dict(
            encoder_layers=3, decoder_layers=3, prior_layers=3, classifier_layers=3,
            hidden_units=30, beta=1.0, lam=1e-2, gamma=0.0,
        )
        defaults.update(values)
        return cls(**defaults)

    @classmethod
    def feature(cls, ablation: Optional[Ablation] = None, **values) -> "ModelConfig":
        """2-layer networks over precomputed features with beta=4, gamma=0.1, lambda=1e-4."""
        defaults = dict(
            encoder_layers=2, decoder_layers=2, prior_layers=2, classifier_layers=2,
            hidden_units=128, beta=4.0, lam=1e-4, gamma=0.1,
        )
        if ablation == "beta1":
            defaults["beta"] = 1.0
        elif ablation == "no_entropy":
            defaults["gamma"] = 0.0
        defaults.update(values)
        return cls(**defaults)
