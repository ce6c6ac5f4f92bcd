# latent-shift-lab/src/latent_shift_lab/scm/noise.py

import logging

import numpy as np

from ..core.constants import NOISE_MEAN_RANGE, NOISE_VARIANCE_RANGE
from ..core.errors import ScmError
from ..models import DomainSpec, ScmConfig
from .seeds import stream

logger = logging.getLogger(__name__)


def sample_domain_specs(config: ScmConfig) -> list[DomainSpec]:
    """Per-domain means ~ U[1, 2] and variances ~ U[0.3, 1] for every noise dimension."""
    if config.n_domains < 2:
        raise ScmError(f"need at least two domains, got {config.n_domains}")
    specs = []
    for u in range(config.n_domains):
        rng = stream(config.seed, "domain_spec", u)
        means = rng.uniform(*NOISE_MEAN_RANGE, size=config.latent_dim)
        variances = rng.uniform(*NOISE_VARIANCE_RANGE, size=config.latent_dim)
        specs.append(DomainSpec(domain_id=u, means=means.tolist(), variances=variances.tolist()))
    logger.debug("sampled %d domain specs (seed=%d)", len(specs), config.seed)
    return specs


def sample_noise(spec: DomainSpec, n: int, seed: int) -> np.ndarray:
    """n x dim matrix of independent Gaussian noise with the domain's means and variances."""
    if n < 1:
        raise ScmError(f"noise sample count must be at least 1, got {n}")
    if np.any(spec.variance_array <= 0):
        raise ScmError(f"domain {spec.domain_id} has a non-positive variance")
    rng = np.random.default_rng(seed)
    return rng.normal(loc=spec.mean_array, scale=np.sqrt(spec.variance_array), size=(n, spec.dim))
