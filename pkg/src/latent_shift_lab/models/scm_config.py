# latent-shift-lab/src/latent_shift_lab/models/scm_config.py

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.constants import BENCHMARK_SAMPLES_PER_DOMAIN

ScmFamily = Literal["paper_cubic", "post_nonlinear"]


class ScmConfig(BaseModel):
    """Latent causal model used to generate multi-domain data."""
    model_config = ConfigDict(extra="forbid")

    d_c: int = Field(ge=1)
    d_s: int = Field(ge=1)
    d_x: int = Field(ge=1)
    n_domains: int = Field(ge=2)
    target_domain: Optional[int] = None
    samples_per_domain: int = Field(ge=1)
    family: ScmFamily = "paper_cubic"
    obs_noise_std: float = Field(default=0.0, ge=0.0)
    label_noise_std: float = Field(default=0.0, ge=0.0)
    mixing_depth: int = Field(default=2, ge=1)
    n_classes: Optional[int] = Field(default=None, ge=2)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_dimensions(self):
        if self.target_domain is None:
            self.target_domain = self.n_domains - 1
        if not 0 <= self.target_domain < self.n_domains:
            raise ValueError(f"target_domain {self.target_domain} outside [0, {self.n_domains})")
        if self.d_x < self.d_c + self.d_s:
            raise ValueError(f"d_x ({self.d_x}) must be at least d_c + d_s ({self.d_c + self.d_s})")
        if self.family == "paper_cubic" and self.d_c != self.d_s:
            raise ValueError("paper_cubic couples z_s to z_c elementwise and needs d_c == d_s")
        return self

    @property
    def latent_dim(self) -> int:
        return self.d_c + self.d_s

    @property
    def task(self) -> Literal["regression", "classification"]:
        return "regression" if self.n_classes is None else "classification"

    @property
    def is_benchmark(self) -> bool:
        return self.n_domains == 2 * self.latent_dim + 1

    @classmethod
    def benchmark(cls, seed: int = 0, **overrides) -> "ScmConfig":
        """Five segments of 1000 samples, one content and one style dimension, last segment is the target."""
        values = dict(
            d_c=1,
            d_s=1,
            d_x=2,
            n_domains=5,
            target_domain=4,
            samples_per_domain=BENCHMARK_SAMPLES_PER_DOMAIN,
            family="paper_cubic",
            mixing_depth=2,
            seed=seed,
        )
        values.update(overrides)
        return cls(**values)
