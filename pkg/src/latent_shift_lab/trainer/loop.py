# latent-shift-lab/src/latent_shift_lab/trainer/loop.py

"""
Training loop of the domain-conditioned VAE.

One epoch is a pass over the pooled source rows. Every step pairs a source
batch with the next target batch (target batches are cycled) and takes one
Adam step on -J. All randomness is keyed on (seed, epoch, step), so a run
resumed from an epoch-boundary checkpoint continues bitwise-identically.

Regression labels are standardized with the source-label mean and standard
deviation before they reach L_MI; the fitted scaling travels with the model
and its checkpoints.
"""

import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np

from ..core.errors import ConfigError, NanLossError, NumericError
from ..core.io import artifact_writer
from ..eval.metrics import estimated_content, mcc, target_metrics
from ..lcsvae import Checkpoint, LabelScaling, LcsVae, save_checkpoint, total_objective
from ..models import Dataset, History, HistoryRecord, ModelConfig, ModelOverrides, TrainConfig
from ..ndiff import Adam, apply, backward
from .batching import batch_indices, draws_for, make_batch, step_rng

logger = logging.getLogger(__name__)

TERMS = ("objective", "elbo", "mi", "entropy")


def build_model_config(
    dataset: Dataset,
    preset: str = "synthetic",
    overrides: Optional[ModelOverrides] = None,
) -> ModelConfig:
    """Model shape for `dataset`; latent dims come from the overrides or the generating SCM."""
    overrides = overrides or ModelOverrides()
    d_c = overrides.d_c or (dataset.config.d_c if dataset.config else None)
    d_s = overrides.d_s or (dataset.config.d_s if dataset.config else None)
    if d_c is None or d_s is None:
        raise ConfigError("model.d_c and model.d_s are required for datasets without a generating SCM")

    values: dict = dict(
        d_x=dataset.d_x, d_c=d_c, d_s=d_s, n_domains=dataset.n_domains,
        task=dataset.task, n_classes=dataset.n_classes, entropy_mode=overrides.entropy_mode,
    )
    if overrides.hidden_units is not None:
        values["hidden_units"] = overrides.hidden_units
    if overrides.layers is not None:
        values.update({f"{net}_layers": overrides.layers for net in ("encoder", "decoder", "prior", "classifier")})
    if preset == "feature":
        return ModelConfig.feature(ablation=overrides.ablation, **values)
    if overrides.ablation is not None:
        raise ConfigError(f"ablation {overrides.ablation!r} applies to the feature preset only")
    return ModelConfig.synthetic(**values)


def _check_inputs(dataset: Dataset, config: ModelConfig):
    if dataset.target_domain is None or dataset.target_indices().size == 0:
        raise ConfigError("training needs exactly one unlabeled target domain")
    if dataset.source_indices().size == 0:
        raise ConfigError("training needs at least one labeled source domain")
    if config.d_x != dataset.d_x:
        raise ConfigError(f"model expects d_x={config.d_x}, dataset has {dataset.d_x}")
    if config.n_domains < dataset.n_domains:
        raise ConfigError(f"model has {config.n_domains} domain slots, dataset has {dataset.n_domains} domains")
    if config.task != dataset.task:
        raise ConfigError(f"model task {config.task} does not match dataset task {dataset.task}")


def _scaled_labels(dataset: Dataset, scaling: LabelScaling) -> Dataset:
    if scaling.is_identity:
        return dataset
    return dataset.model_copy(update={"y": scaling.forward(dataset.y)})


def snapshot(model: LcsVae, dataset: Dataset, epoch: int, means: dict[str, float]) -> HistoryRecord:
    record = dict(epoch=epoch, **means)
    if dataset.latents is not None and dataset.latents.n_c.shape[1] == model.config.d_c:
        try:
            record["mcc"] = mcc(dataset.latents.n_c, estimated_content(model, dataset))
        except NumericError as e:
            logger.warning("epoch %d: MCC unavailable (%s)", epoch, e)
    if dataset.y_true is not None:
        try:
            record["target_metric_name"], record["target_metric"] = target_metrics(model, dataset)
        except (NumericError, ConfigError) as e:
            logger.warning("epoch %d: target metric unavailable (%s)", epoch, e)
    return HistoryRecord(**record)


def train(
    dataset: Dataset,
    train_config: TrainConfig,
    model_config: ModelConfig,
    resume: Optional[Checkpoint] = None,
    checkpoint_path: Optional[str | Path] = None,
) -> tuple[LcsVae, History]:
    """
    Maximize the objective with Adam; returns the trained model and its History.

    With `resume`, parameters, optimizer moments, completed epochs and History
    are taken from the checkpoint. With `checkpoint_path`, a checkpoint is
    written at every snapshot.
    """
    model_config = resume.model.config if resume is not None else train_config.apply_overrides(model_config)
    _check_inputs(dataset, model_config)

    if resume is not None:
        model, history, start = resume.model, History(records=list(resume.history.records)), resume.epoch
        optimizer = Adam(model.parameters(), lr=train_config.learning_rate, state=resume.optimizer_state)
        logger.info("resuming from epoch %d", start)
    else:
        scaling = LabelScaling.fit(dataset.y[dataset.source_indices()], model_config.task)
        model = LcsVae.initialize(model_config, train_config.seed).with_label_scaling(scaling)
        history, start = History(), 0
        optimizer = Adam(model.parameters(), lr=train_config.learning_rate)

    scaled = _scaled_labels(dataset, model.label_scaling)
    seed = train_config.seed
    source_rows, target_rows = dataset.source_indices(), dataset.target_indices()
    d_c, d_s = model.config.d_c, model.config.d_s

    for epoch in range(start, train_config.epochs):
        sources = batch_indices(source_rows, min(train_config.batch_size, source_rows.size), seed, epoch, "source")
        targets = batch_indices(target_rows, min(train_config.batch_size, target_rows.size), seed, epoch, "target")
        sums = dict.fromkeys(TERMS, 0.0)

        for step, rows in enumerate(sources):
            rng = step_rng(seed, epoch, step)
            source = make_batch(scaled, rows)
            target = make_batch(scaled, targets[step % len(targets)])
            terms = total_objective(model, source, target, draws_for(rng, source, d_c, d_s), draws_for(rng, target, d_c, d_s))

            values = terms.values()
            for name in ("mi", "elbo", "entropy", "objective"):
                if not math.isfinite(values[name]):
                    raise NanLossError(name, epoch, step)

            optimizer.zero_grad()
            grads = backward(apply("mul", [terms.objective, -1.0]), optimizer.params)
            ordered = [grads[p] for p in optimizer.params]
            if not all(np.all(np.isfinite(g)) for g in ordered):
                raise NanLossError("gradient", epoch, step)
            optimizer.step(ordered)

            for name in TERMS:
                sums[name] += values[name]

        completed = epoch + 1
        if completed % train_config.eval_every == 0 or completed == train_config.epochs:
            means = {name: total / len(sources) for name, total in sums.items()}
            record = snapshot(model, dataset, completed, means)
            history.append(record)
            logger.info(
                "epoch %d: objective=%.5f elbo=%.5f mi=%.5f entropy=%.5f mcc=%s",
                completed, record.objective, record.elbo, record.mi, record.entropy, record.mcc,
            )
            if checkpoint_path is not None:
                save_checkpoint(
                    checkpoint_path, model, train_config=train_config,
                    optimizer_state=optimizer.state, epoch=completed, history=history,
                )

    if checkpoint_path is not None and start >= train_config.epochs:
        save_checkpoint(
            checkpoint_path, model, train_config=train_config,
            optimizer_state=optimizer.state, epoch=start, history=history,
        )
    return model, history


def save_history(path: str | Path, history: History) -> Path:
    """JSON-lines, one snapshot per line."""
    with artifact_writer(path) as handle:
        handle.write(history.to_jsonl())
    return Path(path)
