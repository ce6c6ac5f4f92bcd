# latent-shift-lab/src/latent_shift_lab/scm/generator.py

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..models import Dataset, DomainSpec, LatentTable, ScmConfig
from .functions import CubicCoupling, MixingMlp, MonotoneMap
from .noise import sample_domain_specs, sample_noise
from .seeds import derive_seed, stream

logger = logging.getLogger(__name__)


class LatentGenerator(BaseModel):
    """Generated-function descriptor of one latent causal model."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ScmConfig
    g_c: MonotoneMap
    g_s1: CubicCoupling
    g_s2: MonotoneMap
    mixing: MixingMlp

    def latents(self, n_c: np.ndarray, n_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z_c = self.g_c(n_c)
        z_s = self.g_s2(self.g_s1(z_c) + n_s)
        return z_c, z_s

    def observe(self, z_c: np.ndarray, z_s: np.ndarray) -> np.ndarray:
        return self.mixing(np.concatenate([z_c, z_s], axis=1))

    def invert_latents(self, z_c: np.ndarray, z_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n_c = self.g_c.inverse(z_c)
        n_s = self.g_s2.inverse(z_s) - self.g_s1(z_c)
        return n_c, n_s

    def label(self, z_c: np.ndarray) -> np.ndarray:
        return np.sum(z_c ** 3, axis=1)


def build_generator(config: ScmConfig) -> LatentGenerator:
    """paper_cubic: z_c = n_c, z_s = z_c^3 + n_s. post_nonlinear: random invertible g_c, g_s2 and cubic g_s1."""
    if config.family == "paper_cubic":
        g_c = MonotoneMap.identity(config.d_c)
        g_s1 = CubicCoupling.identity(config.d_c)
        g_s2 = MonotoneMap.identity(config.d_s)
    else:
        rng = stream(config.seed, "functions")
        g_c = MonotoneMap.random(rng, config.d_c)
        g_s1 = CubicCoupling.random(rng, config.d_c, config.d_s)
        g_s2 = MonotoneMap.random(rng, config.d_s)
    mixing = MixingMlp.random(stream(config.seed, "mixing"), config.latent_dim, config.d_x, config.mixing_depth)
    return LatentGenerator(config=config, g_c=g_c, g_s1=g_s1, g_s2=g_s2, mixing=mixing)


def discretize_labels(y: np.ndarray, n_classes: int) -> np.ndarray:
    """Quantile classes 0..n_classes-1 of a continuous label."""
    edges = np.quantile(y, np.linspace(0.0, 1.0, n_classes + 1)[1:-1])
    return np.searchsorted(edges, y, side="right").astype(np.float64)


def domain_noise(config: ScmConfig, spec: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    noise = sample_noise(spec, config.samples_per_domain, derive_seed(config.seed, "noise", spec.domain_id))
    return noise[:, : config.d_c], noise[:, config.d_c:]


def generate(config: ScmConfig) -> Dataset:
    """Sample every domain; target-domain labels are kept only in `y_true`."""
    specs = sample_domain_specs(config)
    generator = build_generator(config)

    blocks = {name: [] for name in ("n_c", "n_s", "z_c", "z_s", "x", "y", "u")}
    for spec in specs:
        u = spec.domain_id
        n_c, n_s = domain_noise(config, spec)
        z_c, z_s = generator.latents(n_c, n_s)
        x = generator.observe(z_c, z_s)
        if config.obs_noise_std > 0:
            x = x + stream(config.seed, "obs_noise", u).normal(0.0, config.obs_noise_std, size=x.shape)
        y = generator.label(z_c)
        if config.label_noise_std > 0:
            y = y + stream(config.seed, "label_noise", u).normal(0.0, config.label_noise_std, size=y.shape)
        for name, value in (("n_c", n_c), ("n_s", n_s), ("z_c", z_c), ("z_s", z_s), ("x", x), ("y", y)):
            blocks[name].append(value)
        blocks["u"].append(np.full(config.samples_per_domain, u, dtype=np.int64))

    stacked = {name: np.concatenate(parts, axis=0) for name, parts in blocks.items()}
    y_true = stacked["y"]
    if config.n_classes is not None:
        y_true = discretize_labels(y_true, config.n_classes)
    y_train = np.where(stacked["u"] == config.target_domain, np.nan, y_true)

    logger.info(
        "generated %d samples over %d domains (family=%s, target=%d)",
        len(y_true), config.n_domains, config.family, config.target_domain,
    )
    return Dataset(
        config=config,
        task=config.task,
        n_classes=config.n_classes,
        x=stacked["x"],
        y=y_train,
        domains=stacked["u"],
        target_domain=config.target_domain,
        y_true=y_true,
        latents=LatentTable(n_c=stacked["n_c"], n_s=stacked["n_s"], z_c=stacked["z_c"], z_s=stacked["z_s"]),
    )
