# latent-shift-lab/src/latent_shift_lab/lcsvae/losses.py

"""
Objective terms, all quantities to be maximized except the entropy H.

    L_ELBO = E[-1/2 ||x - x_hat||^2] - beta * KL(q_u(n|x) || p_u(n))
    L_MI   = E[log p(y | n_c)]
    H      = E[-sum_y p(y | n_c) log p(y | n_c)]           (target rows)
    J      = L_MI + lambda * L_ELBO - gamma * H             (entropy_mode="penalty")
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import ModelError
from ..ndiff import Tensor, apply
from .model import Batch, GaussianParams, LatentDraws, LcsVae, reparameterize


class EncodedBatch(BaseModel):
    """Posterior blocks of a batch and one reparameterized sample of each."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    content: GaussianParams
    style: GaussianParams
    n_c: Tensor
    n_s: Tensor


class ObjectiveTerms(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    objective: Tensor
    elbo: Tensor
    mi: Tensor
    entropy: Optional[Tensor] = None

    def values(self) -> dict[str, float]:
        return {
            "objective": self.objective.item(),
            "elbo": self.elbo.item(),
            "mi": self.mi.item(),
            "entropy": 0.0 if self.entropy is None else self.entropy.item(),
        }


def encode_batch(model: LcsVae, batch: Batch, draws: LatentDraws) -> EncodedBatch:
    content, style = model.encode(batch.x, batch.domain_onehot)
    return EncodedBatch(
        content=content,
        style=style,
        n_c=reparameterize(content, draws.content),
        n_s=reparameterize(style, draws.style),
    )


# --- Gaussian KL ---

def kl_gaussian_rows(q: GaussianParams, p: GaussianParams) -> Tensor:
    """Per-row sum over dims of log(s_p/s_q) + (s_q^2 + (m_q - m_p)^2) / (2 s_p^2) - 1/2."""
    if q.mean.shape[-1] != p.mean.shape[-1]:
        raise ModelError(f"KL between blocks of different dims: {q.mean.shape} vs {p.mean.shape}")
    half_log_ratio = apply("mul", [apply("sub", [p.log_variance, q.log_variance]), 0.5])
    spread = apply("add", [q.variance, apply("square", [apply("sub", [q.mean, p.mean])])])
    quad = apply("div", [spread, apply("mul", [p.variance, 2.0])])
    per_dim = apply("sub", [apply("add", [half_log_ratio, quad]), 0.5])
    if per_dim.data.ndim == 1:
        return apply("sum", [per_dim])
    return apply("sum", [per_dim], axis=1)


def kl_gaussian(q: GaussianParams, p: GaussianParams) -> Tensor:
    """Total closed-form KL(q || p) summed over every row and dimension."""
    return apply("sum", [kl_gaussian_rows(q, p)])


# --- ELBO ---

def elbo_row_sum(model: LcsVae, batch: Batch, encoded: EncodedBatch) -> tuple[Tensor, Tensor, Tensor]:
    """Summed reconstruction, content KL and style KL over the rows of a batch."""
    prior_c, prior_s = model.prior(batch.domain_onehot)
    x_hat = model.decode(encoded.n_c, encoded.n_s)
    sq_err = apply("sum", [apply("square", [apply("sub", [Tensor(batch.x), x_hat])])])
    recon = apply("mul", [sq_err, -0.5])
    kl_c = kl_gaussian(encoded.content, prior_c)
    kl_s = kl_gaussian(encoded.style, prior_s)
    return recon, kl_c, kl_s


def _elbo_from_sums(recon: Tensor, kl: Tensor, beta: float, n: int) -> Tensor:
    total = apply("sub", [recon, apply("mul", [kl, beta])]) if beta > 0 else recon
    return apply("div", [total, float(n)])


def loss_elbo(
    model: LcsVae,
    batch: Batch,
    draws: Optional[LatentDraws] = None,
    encoded: Optional[EncodedBatch] = None,
) -> Tensor:
    if encoded is None:
        if draws is None:
            raise ModelError("loss_elbo needs latent draws or an encoded batch")
        encoded = encode_batch(model, batch, draws)
    recon, kl_c, kl_s = elbo_row_sum(model, batch, encoded)
    return _elbo_from_sums(recon, apply("add", [kl_c, kl_s]), model.params.beta, batch.size)


# --- Mutual information bound ---

def mi_from_outputs(outputs: Tensor, y: np.ndarray, task: str) -> Tensor:
    """Mean log-likelihood of labels under classifier outputs."""
    if np.any(np.isnan(y)):
        raise ModelError("L_MI needs every row labeled")
    if task == "classification":
        onehot = np.zeros(outputs.shape)
        onehot[np.arange(len(y)), y.astype(np.int64)] = 1.0
        log_p = apply("log_softmax_rows", [outputs])
        return apply("mean", [apply("sum", [apply("mul", [log_p, onehot])], axis=1)])
    residual = apply("sub", [Tensor(y.reshape(-1, 1)), outputs])
    return apply("mul", [apply("mean", [apply("square", [residual])]), -0.5])


def loss_mi(
    model: LcsVae,
    source: Batch,
    draws: Optional[LatentDraws] = None,
    encoded: Optional[EncodedBatch] = None,
) -> Tensor:
    if source.y is None or np.any(~source.is_source):
        raise ModelError("L_MI is defined on labeled source rows only")
    if encoded is None:
        if draws is None:
            raise ModelError("loss_mi needs latent draws or an encoded batch")
        encoded = encode_batch(model, source, draws)
    return mi_from_outputs(model.classify(encoded.n_c), source.y, model.config.task)


# --- Conditional entropy ---

def entropy_from_logits(logits: Tensor) -> Tensor:
    """Mean Shannon entropy (nats) of the row softmax; 0 * log 0 counts as 0."""
    log_p = apply("log_softmax_rows", [logits])
    p = apply("softmax_rows", [logits])
    per_row = apply("sum", [apply("mul", [p, log_p])], axis=1)
    return apply("mul", [apply("mean", [per_row]), -1.0])


def loss_entropy(
    model: LcsVae,
    target: Batch,
    draws: Optional[LatentDraws] = None,
    encoded: Optional[EncodedBatch] = None,
) -> Tensor:
    if model.config.task != "classification":
        raise ModelError("conditional entropy is undefined for regression (gamma is forced to 0)")
    if encoded is None:
        if draws is None:
            raise ModelError("loss_entropy needs latent draws or an encoded batch")
        encoded = encode_batch(model, target, draws)
    return entropy_from_logits(model.classify(encoded.n_c))


# --- Final objective ---

def total_objective(
    model: LcsVae,
    source: Batch,
    target: Batch,
    source_draws: LatentDraws,
    target_draws: LatentDraws,
) -> ObjectiveTerms:
    """L_MI + lambda * L_ELBO -/+ gamma * H; ELBO over source and target rows together."""
    p = model.params
    enc_source = encode_batch(model, source, source_draws)
    enc_target = encode_batch(model, target, target_draws)

    mi = loss_mi(model, source, encoded=enc_source)

    recon_s, kl_c_s, kl_s_s = elbo_row_sum(model, source, enc_source)
    recon_t, kl_c_t, kl_s_t = elbo_row_sum(model, target, enc_target)
    recon = apply("add", [recon_s, recon_t])
    kl = apply("add", [apply("add", [kl_c_s, kl_s_s]), apply("add", [kl_c_t, kl_s_t])])
    elbo = _elbo_from_sums(recon, kl, p.beta, source.size + target.size)

    entropy = None
    if model.config.task == "classification":
        entropy = loss_entropy(model, target, encoded=enc_target)

    objective = mi
    if p.lam > 0:
        objective = apply("add", [objective, apply("mul", [elbo, p.lam])])
    if entropy is not None and p.gamma > 0:
        sign = -1.0 if model.config.entropy_mode == "penalty" else 1.0
        objective = apply("add", [objective, apply("mul", [entropy, sign * p.gamma])])
    return ObjectiveTerms(objective=objective, elbo=elbo, mi=mi, entropy=entropy)
