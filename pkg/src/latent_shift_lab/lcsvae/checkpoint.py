# latent-shift-lab/src/latent_shift_lab/lcsvae/checkpoint.py

"""
Checkpoint file: one JSON document.

{
  "format_version": 1,
  "config": {"model": {...}, "train": {...}},
  "label_scaling": {"mean": ..., "scale": ...},
  "parameters": [{"name": ..., "shape": [...], "data": base64(<f8 bytes)}],
  "optimizer": {"step_count": ..., "m": [...entries], "v": [...entries]},
  "epoch": <completed epochs>,
  "history": [...snapshots]
}
"""

import base64
import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..core.config import settings
from ..core.errors import DataIOError
from ..core.io import artifact_writer, read_text
from ..models import AdamState, History, HistoryRecord, ModelConfig, TrainConfig
from ..ndiff import Tensor
from .model import LabelScaling, LcsVae

logger = logging.getLogger(__name__)


class ParameterEntry(BaseModel):
    name: str
    shape: list[int]
    data: str

    @classmethod
    def encode(cls, name: str, array: np.ndarray) -> "ParameterEntry":
        raw = np.ascontiguousarray(array, dtype="<f8").tobytes()
        return cls(name=name, shape=list(array.shape), data=base64.b64encode(raw).decode("ascii"))

    def decode(self) -> np.ndarray:
        raw = base64.b64decode(self.data)
        arr = np.frombuffer(raw, dtype="<f8").astype(np.float64)
        if arr.size != int(np.prod(self.shape)):
            raise DataIOError(f"parameter {self.name}: {arr.size} values for shape {self.shape}")
        return arr.reshape(self.shape)


class OptimizerEntry(BaseModel):
    step_count: int = 0
    m: list[ParameterEntry] = Field(default_factory=list)
    v: list[ParameterEntry] = Field(default_factory=list)


class CheckpointConfig(BaseModel):
    model: ModelConfig
    train: Optional[TrainConfig] = None


class CheckpointFile(BaseModel):
    format_version: int
    config: CheckpointConfig
    label_scaling: LabelScaling = Field(default_factory=LabelScaling)
    parameters: list[ParameterEntry]
    optimizer: Optional[OptimizerEntry] = None
    epoch: int = 0
    history: list[HistoryRecord] = Field(default_factory=list)


class Checkpoint(BaseModel):
    """Decoded checkpoint: everything needed to predict with or resume a run."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: LcsVae
    train_config: Optional[TrainConfig] = None
    optimizer_state: Optional[AdamState] = None
    epoch: int = 0
    history: History = Field(default_factory=History)


def checkpoint_document(
    model: LcsVae,
    train_config: Optional[TrainConfig] = None,
    optimizer_state: Optional[AdamState] = None,
    epoch: int = 0,
    history: Optional[History] = None,
) -> CheckpointFile:
    names = [name for name, _ in model.named_parameters()]
    optimizer = None
    if optimizer_state is not None:
        optimizer = OptimizerEntry(
            step_count=optimizer_state.step_count,
            m=[ParameterEntry.encode(n, a) for n, a in zip(names, optimizer_state.m)],
            v=[ParameterEntry.encode(n, a) for n, a in zip(names, optimizer_state.v)],
        )
    return CheckpointFile(
        format_version=settings.CHECKPOINT_FORMAT_VERSION,
        config=CheckpointConfig(model=model.config, train=train_config),
        label_scaling=model.label_scaling,
        parameters=[ParameterEntry.encode(n, t.data) for n, t in model.named_parameters()],
        optimizer=optimizer,
        epoch=epoch,
        history=list(history.records) if history is not None else [],
    )


def save_checkpoint(path: str | Path, model: LcsVae, **state) -> Path:
    document = checkpoint_document(model, **state)
    with artifact_writer(path) as handle:
        handle.write(document.model_dump_json(by_alias=True, indent=1))
        handle.write("\n")
    logger.info("saved checkpoint to %s (epoch %d)", path, document.epoch)
    return Path(path)


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        document = CheckpointFile.model_validate(json.loads(read_text(path)))
    except (json.JSONDecodeError, ValidationError) as e:
        raise DataIOError(f"{path} is not a valid checkpoint: {e}") from e
    if document.format_version != settings.CHECKPOINT_FORMAT_VERSION:
        raise DataIOError(f"{path}: unsupported checkpoint format {document.format_version}")

    skeleton = LcsVae.initialize(document.config.model, seed=0)
    expected = [name for name, _ in skeleton.named_parameters()]
    found = [entry.name for entry in document.parameters]
    if expected != found:
        raise DataIOError(f"{path}: parameter names do not match the configured architecture")
    tensors = [Tensor(entry.decode(), requires_grad=True, name=entry.name) for entry in document.parameters]
    model = skeleton.with_parameters(tensors).with_label_scaling(document.label_scaling)

    optimizer_state = None
    if document.optimizer is not None:
        optimizer_state = AdamState(
            step_count=document.optimizer.step_count,
            m=[e.decode() for e in document.optimizer.m],
            v=[e.decode() for e in document.optimizer.v],
        )
    return Checkpoint(
        model=model,
        train_config=document.config.train,
        optimizer_state=optimizer_state,
        epoch=document.epoch,
        history=History(records=document.history),
    )
