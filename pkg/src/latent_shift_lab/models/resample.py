# latent-shift-lab/src/latent_shift_lab/models/resample.py

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.constants import MARGINAL_FLOOR


class ResampleSpec(BaseModel):
    """Target pairwise label KL and the per-domain class counts available to realize it."""
    model_config = ConfigDict(extra="forbid")

    K: int = Field(ge=1)
    C: int = Field(ge=1)
    target_kl: float = Field(ge=0.0)
    available_counts: list[list[int]]
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_counts(self):
        if len(self.available_counts) != self.K or any(len(row) != self.C for row in self.available_counts):
            raise ValueError(f"available_counts must be {self.K}x{self.C}")
        if any(c < 0 for row in self.available_counts for c in row):
            raise ValueError("available_counts must be non-negative")
        return self


class MarginalSet(BaseModel):
    """Per-domain categorical label marginals and their achieved ordered-pair KL matrix."""
    distributions: list[list[float]]
    kl_matrix: list[list[float]]

    @model_validator(mode="after")
    def check_simplex(self):
        for k, p in enumerate(self.distributions):
            if abs(sum(p) - 1.0) > 1e-12:
                raise ValueError(f"distribution {k} sums to {sum(p)!r}, not 1")
            if min(p) < MARGINAL_FLOOR * (1 - 1e-9):
                raise ValueError(f"distribution {k} has an entry below {MARGINAL_FLOOR}")
        K = len(self.distributions)
        if len(self.kl_matrix) != K or any(len(row) != K for row in self.kl_matrix):
            raise ValueError("kl_matrix must be KxK")
        return self

    @property
    def K(self) -> int:
        return len(self.distributions)

    @property
    def C(self) -> int:
        return len(self.distributions[0])

    def max_residual(self, target: float) -> float:
        K = self.K
        return max(
            (abs(self.kl_matrix[i][j] - target) for i in range(K) for j in range(K) if i != j),
            default=0.0,
        )
