# latent-shift-lab/src/latent_shift_lab/models/history.py

import math
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class HistoryRecord(BaseModel):
    """Epoch-mean loss terms plus evaluation metrics at one snapshot."""
    epoch: int = Field(ge=0)
    elbo: float
    mi: float
    entropy: float
    objective: float
    mcc: Optional[float] = None
    target_metric: Optional[float] = None
    target_metric_name: Optional[str] = None

    @field_validator("elbo", "mi", "entropy", "objective", "mcc", "target_metric")
    def finite(cls, v):
        if v is not None and not math.isfinite(v):
            raise ValueError("history values must be finite")
        return v


class History(BaseModel):
    records: list[HistoryRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def ordered(self):
        epochs = [r.epoch for r in self.records]
        if epochs != sorted(epochs) or len(set(epochs)) != len(epochs):
            raise ValueError("history snapshots must be strictly ordered by epoch")
        return self

    def append(self, record: HistoryRecord):
        if self.records and record.epoch <= self.records[-1].epoch:
            raise ValueError(f"snapshot for epoch {record.epoch} arrives after epoch {self.records[-1].epoch}")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def to_jsonl(self) -> str:
        return "".join(r.model_dump_json() + "\n" for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "History":
        return cls(records=[HistoryRecord.model_validate_json(line) for line in text.splitlines() if line.strip()])
