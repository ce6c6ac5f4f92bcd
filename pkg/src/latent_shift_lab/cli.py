# latent-shift-lab/src/latent_shift_lab/cli.py

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from .core.config import settings
from .core.constants import EXIT_CONFIG_ERROR, GRAD_CHECK_TOLERANCE, SOLVER_MAX_ITERATIONS
from .core.errors import ConfigError, LabError, NumericError
from .core.io import artifact_writer, read_text
from .core.log import configure_logging
from .eval import evaluate, target_metrics
from .lcsvae import load_checkpoint, loss_gradchecks
from .models import Dataset, ExperimentConfig, ScmConfig
from .ndiff import op_gradchecks
from .resampler import as_classification, resample_spec_from_dataset, save_marginals, solve_marginals, subsample
from .scm import (
    counterexample_report,
    generate,
    load_dataset,
    sample_domain_specs,
    save_dataset,
    variability_matrix,
)
from .trainer import build_model_config, save_history, train, train_erm

logger = logging.getLogger(__name__)


# --- Plumbing ---

def _field_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def handle_errors(command):
    """Map library errors onto exit codes; details go to standard error."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ValidationError as e:
            for error in e.errors():
                click.echo(f"❌ config error at {_field_path(error)}: {error['msg']}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        except LabError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            sys.exit(e.exit_code)

    return wrapper


def load_experiment(config_path: Optional[str], seed: Optional[int]) -> ExperimentConfig:
    if config_path is None:
        return ExperimentConfig().with_seed(seed)
    try:
        raw = json.loads(read_text(config_path))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path} is not valid JSON: {e}") from e
    return ExperimentConfig.model_validate(raw).with_seed(seed)


def out_dir(cfg: ExperimentConfig, out: Optional[str]) -> Path:
    return Path(out or cfg.paths.out_dir or settings.OUTPUT_DIR)


def default_scm(cfg: ExperimentConfig, **overrides) -> ScmConfig:
    if cfg.scm is not None:
        return cfg.scm
    if cfg.n_classes is not None:
        overrides.setdefault("n_classes", cfg.n_classes)
    return ScmConfig.benchmark(seed=cfg.seed or 0, **overrides)


def load_or_generate(cfg: ExperimentConfig, dataset_path: Optional[str] = None) -> Dataset:
    path = dataset_path or cfg.paths.dataset
    if path is not None:
        return load_dataset(path, task=cfg.task, n_classes=cfg.n_classes)
    return generate(default_scm(cfg))


def write_json(path: Path, payload: dict) -> Path:
    with artifact_writer(path) as handle:
        handle.write(json.dumps(payload, indent=2, sort_keys=True))
        handle.write("\n")
    return path


def emit(payload: dict):
    """The single machine-readable document of a command."""
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


config_option = click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Experiment JSON file.")
seed_option = click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Root seed overriding the config.")
out_option = click.option("--out", type=click.Path(file_okay=False), help="Output directory.")


# --- Commands ---

@click.group()
@click.option("--log-level", default=None, help="Overrides LCS_LOG_LEVEL.")
def cli(log_level):
    """Latent covariate shift laboratory"""
    load_dotenv()
    configure_logging(log_level)


@cli.command("generate")
@config_option
@seed_option
@out_option
@handle_errors
def generate_command(config_path, seed, out):
    """Sample a multi-domain dataset from the latent causal model."""
    cfg = load_experiment(config_path, seed)
    scm = default_scm(cfg)
    click.echo(f"🚀 Generating {scm.n_domains} domains x {scm.samples_per_domain} samples ({scm.family})...", err=True)
    dataset = generate(scm)
    files = save_dataset(dataset, out_dir(cfg, out) / "dataset.csv")
    click.echo("✅ Dataset written.", err=True)
    payload = {
        "command": "generate",
        "files": [str(f) for f in files],
        "per_domain_counts": {str(k): v for k, v in dataset.per_domain_counts().items()},
        "target_domain": dataset.target_domain,
    }
    if scm.is_benchmark:
        variability = variability_matrix(sample_domain_specs(scm))
        payload["variability_singular"] = variability.singular
        payload["variability_condition_number"] = None if variability.singular else variability.condition_number
    emit(payload)


@cli.command("train")
@config_option
@seed_option
@out_option
@click.option("--dataset", "dataset_path", type=click.Path(dir_okay=False), help="Dataset CSV overriding the config.")
@click.option("--resume", "resume_path", type=click.Path(dir_okay=False), help="Checkpoint to continue from.")
@click.option("--erm/--no-erm", default=False, help="Also fit the ERM baseline on source data.")
@handle_errors
def train_command(config_path, seed, out, dataset_path, resume_path, erm):
    """Fit the domain-conditioned VAE; writes a checkpoint and a JSON-lines history."""
    cfg = load_experiment(config_path, seed)
    dataset = load_or_generate(cfg, dataset_path)
    target_dir = out_dir(cfg, out)
    checkpoint_path = target_dir / "checkpoint.json"

    resume = load_checkpoint(resume_path) if resume_path else None
    model_config = build_model_config(dataset, cfg.train.preset, cfg.model)
    click.echo(f"🚀 Training for {cfg.train.epochs} epochs (seed {cfg.train.seed})...", err=True)
    model, history = train(dataset, cfg.train, model_config, resume=resume, checkpoint_path=checkpoint_path)

    last_epoch = history.records[-1].epoch if history.records else (resume.epoch if resume else 0)
    history_path = save_history(target_dir / "history.jsonl", history)

    payload = {
        "command": "train",
        "files": [str(checkpoint_path), str(history_path)],
        "epochs": last_epoch,
        "final": history.records[-1].model_dump() if history.records else None,
    }
    if erm:
        click.echo("🚀 Fitting ERM baseline...", err=True)
        baseline = train_erm(dataset, cfg.train)
        payload["erm"] = {"loss_trace": baseline.loss_trace}
        if dataset.y_true is not None:
            name, value = target_metrics(baseline, dataset)
            payload["erm"][name] = value
    click.echo("✅ Training finished.", err=True)
    emit(payload)


@cli.command("evaluate")
@config_option
@seed_option
@out_option
@click.option("--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False), help="Checkpoint to evaluate.")
@click.option("--dataset", "dataset_path", type=click.Path(dir_okay=False), help="Dataset CSV to evaluate on.")
@handle_errors
def evaluate_command(config_path, seed, out, checkpoint_path, dataset_path):
    """Report MCC, target-domain quality and the label KL matrix."""
    cfg = load_experiment(config_path, seed)
    checkpoint_path = checkpoint_path or cfg.paths.checkpoint
    if checkpoint_path is None:
        raise ConfigError("evaluate needs --checkpoint or paths.checkpoint")
    checkpoint = load_checkpoint(checkpoint_path)
    trained = checkpoint.model.config
    cfg = cfg.model_copy(update={"task": trained.task, "n_classes": trained.n_classes})
    dataset = load_or_generate(cfg, dataset_path)
    report = evaluate(checkpoint.model, dataset)
    path = out_dir(cfg, out) / "metrics.json"
    with artifact_writer(path) as handle:
        handle.write(report.model_dump_json(indent=2))
        handle.write("\n")
    emit({"command": "evaluate", "files": [str(path)], "report": json.loads(report.model_dump_json())})


@cli.command("resample")
@config_option
@seed_option
@out_option
@click.option("--dataset", "dataset_path", type=click.Path(dir_okay=False), help="Labeled dataset CSV to resample.")
@click.option("--target-kl", type=click.FloatRange(min=0.0), help="Overrides resample.target_kl.")
@handle_errors
def resample_command(config_path, seed, out, dataset_path, target_kl):
    """Subsample a labeled dataset so pairwise label KL between domains hits a target."""
    cfg = load_experiment(config_path, seed)
    options = cfg.resample
    if options is None and target_kl is None:
        raise ConfigError("resample needs --target-kl or a resample section")
    target = target_kl if target_kl is not None else options.target_kl
    max_iterations = options.max_iterations if options else SOLVER_MAX_ITERATIONS
    n_classes = (options.n_classes if options else None) or cfg.n_classes

    dataset = as_classification(load_or_generate(cfg, dataset_path), n_classes)
    root_seed = cfg.seed or 0
    spec = resample_spec_from_dataset(dataset, target, root_seed)
    click.echo(f"🚀 Solving {spec.K}x{spec.C} marginals for label KL {target}...", err=True)
    marginals = solve_marginals(spec, max_iterations=max_iterations)
    result = subsample(dataset, marginals, root_seed)

    target_dir = out_dir(cfg, out)
    files = save_dataset(result.dataset, target_dir / "resampled.csv")
    files.append(save_marginals(target_dir / "marginals.json", marginals))
    click.echo(f"✅ Kept {result.indices.size} of {dataset.n_samples} samples.", err=True)
    emit({
        "command": "resample",
        "files": [str(f) for f in files],
        "max_residual": marginals.max_residual(target),
        "class_counts": result.class_counts,
        "scales": result.scales,
    })


@cli.command("counterexample")
@config_option
@seed_option
@out_option
@handle_errors
def counterexample_command(config_path, seed, out):
    """Build the observationally equivalent model with independent latents and compare."""
    cfg = load_experiment(config_path, seed)
    scm = default_scm(cfg, family="post_nonlinear")
    report = counterexample_report(scm)
    path = write_json(out_dir(cfg, out) / "counterexample.json", report.model_dump())
    marker = "✅" if report.equivalent else "⚠️"
    click.echo(f"{marker} max |x - x'| = {report.max_abs_difference:.3g}", err=True)
    emit({"command": "counterexample", "files": [str(path)], "report": report.model_dump()})


@cli.command("gradcheck")
@seed_option
@out_option
@handle_errors
def gradcheck_command(seed, out):
    """Compare analytic and finite-difference gradients of every op and loss term."""
    seed = seed or 0
    ops = op_gradchecks(seed)
    losses = loss_gradchecks(seed)
    worst = max([*ops.values(), *losses.values()])
    payload = {
        "command": "gradcheck",
        "ops": ops,
        "losses": losses,
        "max_error": worst,
        "tolerance": GRAD_CHECK_TOLERANCE,
        "passed": worst < GRAD_CHECK_TOLERANCE,
    }
    path = write_json(Path(out or settings.OUTPUT_DIR) / "gradcheck.json", payload)
    payload["files"] = [str(path)]
    emit(payload)
    if not payload["passed"]:
        raise NumericError(f"gradient check failed: max relative error {worst:.3g}")


if __name__ == "__main__":
    cli()
