# latent-shift-lab/src/latent_shift_lab/models/adam_state.py

from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class AdamState(BaseModel):
    """First/second moment estimates for a fixed, ordered list of parameters."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    step_count: int = Field(default=0, ge=0)
    m: list[np.ndarray]
    v: list[np.ndarray]

    @model_validator(mode="after")
    def moments_align(self):
        if len(self.m) != len(self.v):
            raise ValueError("m and v must track the same number of parameters")
        for i, (m, v) in enumerate(zip(self.m, self.v)):
            if m.shape != v.shape:
                raise ValueError(f"moment shapes differ for parameter {i}: {m.shape} vs {v.shape}")
            if np.any(v < 0):
                raise ValueError(f"second moment of parameter {i} has negative entries")
        return self

    @classmethod
    def fresh(cls, params: Sequence[np.ndarray]) -> "AdamState":
        return cls(
            step_count=0,
            m=[np.zeros_like(p, dtype=np.float64) for p in params],
            v=[np.zeros_like(p, dtype=np.float64) for p in params],
        )
