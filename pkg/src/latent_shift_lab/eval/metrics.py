# latent-shift-lab/src/latent_shift_lab/eval/metrics.py

import itertools
import logging
import math
from typing import Protocol

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..core.errors import ConfigError, NumericError
from ..models import Dataset, MatchedPair, MetricReport
from ..scm.generator import discretize_labels

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 8


class Predictor(Protocol):
    def predict(self, x: np.ndarray, u: np.ndarray) -> np.ndarray: ...


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape or a.size < 2:
        raise ConfigError(f"pearson needs two equal-length series of length >= 2, got {a.size} and {b.size}")
    da, db = a - a.mean(), b - b.mean()
    sa, sb = float(np.dot(da, da)), float(np.dot(db, db))
    if sa == 0.0 or sb == 0.0:
        raise NumericError("pearson: a series has zero variance")
    r = float(np.dot(da, db)) / math.sqrt(sa * sb)
    return min(1.0, max(-1.0, r))


def match_components(abs_corr: np.ndarray) -> tuple[list[int], float]:
    """
    Permutation maximizing the total matched correlation: row i is matched to
    column perm[i]. Exhaustive for d <= 8 (first optimum in lexicographic order),
    assignment algorithm beyond.
    """
    abs_corr = np.asarray(abs_corr, dtype=np.float64)
    if abs_corr.ndim != 2 or abs_corr.shape[0] != abs_corr.shape[1]:
        raise ConfigError(f"match_components needs a square matrix, got shape {abs_corr.shape}")
    d = abs_corr.shape[0]
    if d <= EXHAUSTIVE_LIMIT:
        perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
        totals = abs_corr[np.arange(d), perms].sum(axis=1)
        best = int(np.argmax(totals))
        return perms[best].tolist(), float(totals[best])
    rows, cols = linear_sum_assignment(abs_corr, maximize=True)
    perm = cols[np.argsort(rows)].tolist()
    return perm, float(abs_corr[np.arange(d), perm].sum())


def correlation_matrix(true: np.ndarray, est: np.ndarray) -> np.ndarray:
    d = true.shape[1]
    return np.array([[abs(pearson(true[:, i], est[:, j])) for j in range(d)] for i in range(d)])


def mcc_matching(true_nc: np.ndarray, est_nc: np.ndarray) -> tuple[float, list[MatchedPair]]:
    true_nc = np.asarray(true_nc, dtype=np.float64)
    est_nc = np.asarray(est_nc, dtype=np.float64)
    if true_nc.shape != est_nc.shape or true_nc.ndim != 2:
        raise ConfigError(f"mcc needs matching n x d matrices, got {true_nc.shape} and {est_nc.shape}")
    if true_nc.shape[0] < 3:
        raise ConfigError("mcc needs at least 3 samples")
    corr = correlation_matrix(true_nc, est_nc)
    perm, _ = match_components(corr)
    pairs = [MatchedPair(true_index=i, est_index=j, abs_correlation=float(corr[i, j])) for i, j in enumerate(perm)]
    value = float(np.mean([p.abs_correlation for p in pairs]))
    return value, pairs


def mcc(true_nc: np.ndarray, est_nc: np.ndarray) -> float:
    """Mean absolute Pearson correlation after optimal permutation matching."""
    return mcc_matching(true_nc, est_nc)[0]


def label_kl(p, q) -> float:
    """sum_k p_k ln(p_k / q_k) with 0 ln(0/q) = 0; inf when q_k = 0 < p_k."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ConfigError(f"label_kl needs equal supports, got {p.shape} and {q.shape}")
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def empirical_label_distribution(labels: np.ndarray, n_classes: int) -> np.ndarray:
    counts = np.bincount(labels.astype(np.int64), minlength=n_classes).astype(np.float64)
    return counts / counts.sum()


def label_kl_matrix(dataset: Dataset, regression_bins: int = 5) -> list[list[float]]:
    """Pairwise KL between per-domain label distributions; regression labels are quantile-binned."""
    labels = dataset.evaluation_labels()
    known = ~np.isnan(labels)
    if dataset.task == "classification":
        classes, n_classes = labels, dataset.n_classes
    else:
        classes = np.full_like(labels, np.nan)
        classes[known] = discretize_labels(labels[known], regression_bins)
        n_classes = regression_bins

    ids = dataset.domain_ids
    dists = {}
    for u in ids:
        rows = (dataset.domains == u) & known
        if rows.any():
            dists[u] = empirical_label_distribution(classes[rows], n_classes)
    return [[label_kl(dists[a], dists[b]) if a in dists and b in dists else math.nan for b in ids] for a in ids]


def _domain_onehot(dataset: Dataset, rows: np.ndarray) -> np.ndarray:
    onehot = np.zeros((int(rows.sum()) if rows.dtype == bool else len(rows), dataset.n_domains))
    onehot[np.arange(onehot.shape[0]), dataset.domains[rows].astype(np.int64)] = 1.0
    return onehot


def target_metrics(model: Predictor, dataset: Dataset) -> tuple[str, float]:
    """("target_r2", R^2) for regression or ("target_accuracy", accuracy) on the target domain."""
    if dataset.target_domain is None:
        raise ConfigError("dataset has no target domain")
    rows = dataset.domains == dataset.target_domain
    truth = None if dataset.y_true is None else dataset.y_true[rows]
    if truth is None or np.any(np.isnan(truth)):
        raise ConfigError("target-domain evaluation labels were not retained")

    pred = model.predict(dataset.x[rows], _domain_onehot(dataset, rows))
    if dataset.task == "classification":
        return "target_accuracy", float(np.mean(np.argmax(pred, axis=1) == truth.astype(np.int64)))
    ss_res = float(np.sum((truth - pred) ** 2))
    ss_tot = float(np.sum((truth - truth.mean()) ** 2))
    if ss_tot == 0.0:
        raise NumericError("target labels are constant; R^2 is undefined")
    return "target_r2", 1.0 - ss_res / ss_tot


def estimated_content(model, dataset: Dataset) -> np.ndarray:
    rows = np.ones(dataset.n_samples, dtype=bool)
    return model.posterior_mean(dataset.x, _domain_onehot(dataset, rows))


def evaluate(model, dataset: Dataset) -> MetricReport:
    """MCC on pooled source+target data, target-domain quality and label KL matrix."""
    report: dict = {"label_kl_matrix": label_kl_matrix(dataset)}
    if dataset.latents is not None:
        value, pairs = mcc_matching(dataset.latents.n_c, estimated_content(model, dataset))
        report.update(mcc=value, matching=pairs)
    if dataset.target_domain is not None and dataset.y_true is not None:
        name, value = target_metrics(model, dataset)
        report[name] = value
    logger.info("evaluation: mcc=%s %s", report.get("mcc"), {k: v for k, v in report.items() if k.startswith("target")})
    return MetricReport(**report)
