# latent-shift-lab/src/latent_shift_lab/models/metric_report.py

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MatchedPair(BaseModel):
    true_index: int = Field(ge=0)
    est_index: int = Field(ge=0)
    abs_correlation: float = Field(ge=0.0, le=1.0)


class MetricReport(BaseModel):
    # Infinite label KL is reported as the string "Infinity".
    model_config = ConfigDict(ser_json_inf_nan="strings")

    mcc: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    matching: list[MatchedPair] = Field(default_factory=list)
    target_r2: Optional[float] = None
    target_accuracy: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    label_kl_matrix: list[list[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_matching(self):
        if self.matching:
            trues = sorted(p.true_index for p in self.matching)
            ests = sorted(p.est_index for p in self.matching)
            if trues != list(range(len(trues))) or ests != list(range(len(ests))):
                raise ValueError("matching must be a bijection")
            if self.mcc is not None:
                mean = sum(p.abs_correlation for p in self.matching) / len(self.matching)
                if abs(mean - self.mcc) > 1e-9:
                    raise ValueError("mcc must equal the mean of matched correlations")
        return self
