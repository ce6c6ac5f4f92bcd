# latent-shift-lab/src/latent_shift_lab/models/samples.py

from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .scm_config import ScmConfig

Task = Literal["regression", "classification"]


class LatentSample(BaseModel):
    """Ground-truth latent noise and latent variables of one record."""
    n_c: list[float]
    n_s: list[float]
    z_c: list[float]
    z_s: list[float]
    domain_id: int = Field(ge=0)


class LabeledSample(BaseModel):
    """One observed record; `y` is absent for unlabeled target rows."""
    x: list[float]
    y: Optional[Union[int, float]] = None
    domain_id: int = Field(ge=0)


class LatentTable(BaseModel):
    """Column-stacked ground-truth latents, aligned row-for-row with a Dataset."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_c: np.ndarray
    n_s: np.ndarray
    z_c: np.ndarray
    z_s: np.ndarray

    @model_validator(mode="after")
    def check_alignment(self):
        rows = {a.shape[0] for a in (self.n_c, self.n_s, self.z_c, self.z_s)}
        if len(rows) != 1:
            raise ValueError("latent blocks must have the same number of rows")
        if self.n_c.shape != self.z_c.shape or self.n_s.shape != self.z_s.shape:
            raise ValueError("noise and latent blocks must share dimensions")
        for name in ("n_c", "n_s", "z_c", "z_s"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"latent block {name} has non-finite entries")
        return self

    def take(self, indices: np.ndarray) -> "LatentTable":
        return LatentTable(n_c=self.n_c[indices], n_s=self.n_s[indices], z_c=self.z_c[indices], z_s=self.z_s[indices])


class Dataset(BaseModel):
    """
    Multi-domain records stored column-wise.

    `y` holds the training view (NaN where unlabeled); `y_true` keeps every
    label, including the withheld target ones, for evaluation only.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: Optional[ScmConfig] = None
    task: Task = "regression"
    n_classes: Optional[int] = None
    x: np.ndarray
    y: np.ndarray
    domains: np.ndarray
    target_domain: Optional[int] = None
    y_true: Optional[np.ndarray] = None
    latents: Optional[LatentTable] = None

    @model_validator(mode="after")
    def check_columns(self):
        n = self.x.shape[0]
        if self.x.ndim != 2:
            raise ValueError(f"x must be a matrix, got shape {self.x.shape}")
        if self.y.shape != (n,) or self.domains.shape != (n,):
            raise ValueError("y and domains must have one entry per row of x")
        if self.y_true is not None and self.y_true.shape != (n,):
            raise ValueError("y_true must have one entry per row of x")
        if self.latents is not None and self.latents.n_c.shape[0] != n:
            raise ValueError("latents must align index-for-index with samples")
        if self.target_domain is not None:
            in_target = self.domains == self.target_domain
            if np.any(~np.isnan(self.y[in_target])):
                raise ValueError(f"target domain {self.target_domain} rows must be unlabeled in the training view")
            if np.any(np.isnan(self.y[~in_target])):
                raise ValueError("every source-domain sample needs a label")
        if self.task == "classification" and self.n_classes is None:
            raise ValueError("classification datasets need n_classes")
        return self

    # --- Shape helpers ---

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]

    @property
    def d_x(self) -> int:
        return self.x.shape[1]

    @property
    def domain_ids(self) -> list[int]:
        return sorted(int(d) for d in np.unique(self.domains))

    @property
    def n_domains(self) -> int:
        if self.config is not None:
            return self.config.n_domains
        return max(self.domain_ids) + 1

    @property
    def labeled_mask(self) -> np.ndarray:
        return ~np.isnan(self.y)

    def per_domain_counts(self) -> dict[int, int]:
        ids, counts = np.unique(self.domains, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, counts)}

    def evaluation_labels(self) -> np.ndarray:
        """Every known label: the training view where present, otherwise the withheld one."""
        if self.y_true is None:
            return self.y.copy()
        return np.where(np.isnan(self.y), self.y_true, self.y)

    # --- Views ---

    def subset(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            config=self.config,
            task=self.task,
            n_classes=self.n_classes,
            x=self.x[indices],
            y=self.y[indices],
            domains=self.domains[indices],
            target_domain=self.target_domain,
            y_true=None if self.y_true is None else self.y_true[indices],
            latents=None if self.latents is None else self.latents.take(indices),
        )

    def source_indices(self) -> np.ndarray:
        return np.flatnonzero(self.domains != self.target_domain)

    def target_indices(self) -> np.ndarray:
        return np.flatnonzero(self.domains == self.target_domain)

    def samples(self) -> list[LabeledSample]:
        out = []
        for i in range(self.n_samples):
            y = None
            if not np.isnan(self.y[i]):
                y = int(self.y[i]) if self.task == "classification" else float(self.y[i])
            out.append(LabeledSample(x=self.x[i].tolist(), y=y, domain_id=int(self.domains[i])))
        return out

    def latent_samples(self) -> list[LatentSample]:
        if self.latents is None:
            return []
        lt = self.latents
        return [
            LatentSample(
                n_c=lt.n_c[i].tolist(),
                n_s=lt.n_s[i].tolist(),
                z_c=lt.z_c[i].tolist(),
                z_s=lt.z_s[i].tolist(),
                domain_id=int(self.domains[i]),
            )
            for i in range(self.n_samples)
        ]
