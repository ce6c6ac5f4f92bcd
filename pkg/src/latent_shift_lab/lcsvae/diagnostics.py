# latent-shift-lab/src/latent_shift_lab/lcsvae/diagnostics.py

import numpy as np

from ..models import ModelConfig
from ..ndiff import grad_check
from .losses import total_objective
from .model import Batch, LatentDraws, LcsVae

CHECK_CONFIG = dict(
    d_x=3, d_c=1, d_s=1, n_domains=3, task="classification", n_classes=3,
    encoder_layers=2, decoder_layers=2, prior_layers=2, classifier_layers=2,
    hidden_units=4, beta=1.0, lam=0.5, gamma=0.1,
)


def loss_gradchecks(seed: int = 0, eps: float = 1e-5) -> dict[str, float]:
    """Max relative gradient error of each objective term w.r.t. every parameter of a small model."""
    rng = np.random.default_rng(seed)
    config = ModelConfig(**CHECK_CONFIG)
    model = LcsVae.initialize(config, seed)
    # Random prior head so the prior gradients are not trivially zero.
    for t in model.params.prior_net.weights:
        t.data = rng.normal(0.0, 0.3, size=t.shape)

    source = Batch.from_arrays(rng.normal(size=(4, 3)), np.array([0, 0, 1, 1]), 3, np.array([0.0, 1.0, 2.0, 1.0]))
    target = Batch.from_arrays(rng.normal(size=(3, 3)), np.array([2, 2, 2]), 3)
    source_draws = LatentDraws.sample(rng, source.size, 1, 1)
    target_draws = LatentDraws.sample(rng, target.size, 1, 1)

    def term(name: str):
        def f(params):
            terms = total_objective(model.with_parameters(params), source, target, source_draws, target_draws)
            return getattr(terms, name)
        return f

    point = [p.data.copy() for p in model.parameters()]
    return {name: grad_check(term(name), point, eps) for name in ("elbo", "mi", "entropy", "objective")}
