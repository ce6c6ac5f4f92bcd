# latent-shift-lab/src/latent_shift_lab/lcsvae/model.py

"""
Domain-conditioned VAE over latent noise n = (n_c, n_s).

    prior      p_u(n)      = N(mu(u), Sigma(u))            prior_net(one-hot u)
    posterior  q_u(n | x)  = N(mu'(x, u), Sigma'(x, u))    encoder_net(x ++ one-hot u)
    decoder    x_hat       = decoder_net(n_c ++ n_s)
    predictor  p(y | n_c)  = classifier_net(n_c)

Regression labels enter L_MI standardized with the source-label mean and
standard deviation; `predict` maps outputs back to the raw label scale.
"""

from typing import Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..core.constants import LOG_VARIANCE_BOUND
from ..core.errors import ModelError
from ..models import ModelConfig
from ..ndiff import Tensor, apply
from ..scm.seeds import stream
from .networks import Mlp


class GaussianParams(BaseModel):
    """Diagonal Gaussian block; log_variance is always clamped to [-8, 8]."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mean: Tensor
    log_variance: Tensor

    @model_validator(mode="after")
    def same_shape(self):
        if self.mean.shape != self.log_variance.shape:
            raise ModelError(f"mean {self.mean.shape} and log_variance {self.log_variance.shape} differ")
        return self

    @classmethod
    def from_raw(cls, mean: Tensor, raw_log_variance: Tensor) -> "GaussianParams":
        clamped = apply("clip", [raw_log_variance], lo=-LOG_VARIANCE_BOUND, hi=LOG_VARIANCE_BOUND)
        return cls(mean=mean, log_variance=clamped)

    @property
    def dim(self) -> int:
        return self.mean.shape[-1]

    @property
    def variance(self) -> Tensor:
        return apply("exp", [self.log_variance])


class Batch(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    domain_onehot: np.ndarray
    y: Optional[np.ndarray] = None
    is_source: np.ndarray

    @model_validator(mode="after")
    def consistent_rows(self):
        n = self.x.shape[0]
        if n == 0:
            raise ModelError("empty batch")
        if self.domain_onehot.shape[0] != n or self.is_source.shape != (n,):
            raise ModelError("batch columns disagree on the number of rows")
        labeled = np.zeros(n, dtype=bool) if self.y is None else ~np.isnan(self.y)
        if not np.array_equal(labeled, self.is_source.astype(bool)):
            raise ModelError("labels must be present exactly on source rows")
        return self

    @property
    def size(self) -> int:
        return self.x.shape[0]

    @classmethod
    def from_arrays(cls, x: np.ndarray, domains: np.ndarray, n_domains: int, y: Optional[np.ndarray] = None) -> "Batch":
        onehot = np.zeros((len(domains), n_domains))
        onehot[np.arange(len(domains)), domains.astype(np.int64)] = 1.0
        is_source = np.zeros(len(domains), dtype=bool) if y is None else ~np.isnan(y)
        return cls(x=x, domain_onehot=onehot, y=y, is_source=is_source)


class LatentDraws(BaseModel):
    """Standard-normal draws for one reparameterized sample of each latent block."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    content: np.ndarray
    style: np.ndarray

    @classmethod
    def sample(cls, rng: np.random.Generator, n: int, d_c: int, d_s: int) -> "LatentDraws":
        return cls(content=rng.standard_normal((n, d_c)), style=rng.standard_normal((n, d_s)))

    @classmethod
    def zeros(cls, n: int, d_c: int, d_s: int) -> "LatentDraws":
        return cls(content=np.zeros((n, d_c)), style=np.zeros((n, d_s)))


class VaeParams(BaseModel):
    """All learnable arrays of the four networks plus the objective weights."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    prior_net: Mlp
    encoder_net: Mlp
    decoder_net: Mlp
    classifier_net: Mlp
    beta: float
    lam: float
    gamma: float
    task: Literal["regression", "classification"]

    @property
    def networks(self) -> tuple[Mlp, Mlp, Mlp, Mlp]:
        return self.prior_net, self.encoder_net, self.decoder_net, self.classifier_net

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [item for net in self.networks for item in net.named_parameters()]

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.named_parameters()]

    def rebind(self, tensors: Mapping[str, Tensor]) -> "VaeParams":
        return self.model_copy(update={
            "prior_net": self.prior_net.rebind(tensors),
            "encoder_net": self.encoder_net.rebind(tensors),
            "decoder_net": self.decoder_net.rebind(tensors),
            "classifier_net": self.classifier_net.rebind(tensors),
        })


class LabelScaling(BaseModel):
    """Affine map between raw regression labels and the scale the classifier is trained on."""

    mean: float = 0.0
    scale: float = 1.0

    @classmethod
    def fit(cls, y: np.ndarray, task: str) -> "LabelScaling":
        labeled = y[~np.isnan(y)]
        if task != "regression" or labeled.size < 2:
            return cls()
        scale = float(np.std(labeled))
        if not np.isfinite(scale) or scale == 0.0:
            raise ModelError("regression labels of the source domains have zero spread")
        return cls(mean=float(np.mean(labeled)), scale=scale)

    @property
    def is_identity(self) -> bool:
        return self.mean == 0.0 and self.scale == 1.0

    def forward(self, y: np.ndarray) -> np.ndarray:
        return (y - self.mean) / self.scale

    def inverse(self, y: np.ndarray) -> np.ndarray:
        return y * self.scale + self.mean


def reparameterize(gp: GaussianParams, draws: np.ndarray) -> Tensor:
    """mean + sqrt(variance) * draws."""
    if draws.shape != gp.mean.shape:
        raise ModelError(f"draws {draws.shape} do not match Gaussian block {gp.mean.shape}")
    std = apply("exp", [apply("mul", [gp.log_variance, 0.5])])
    return apply("add", [gp.mean, apply("mul", [std, draws])])


class LcsVae:
    def __init__(self, config: ModelConfig, params: VaeParams, label_scaling: Optional[LabelScaling] = None):
        self.config = config
        self.params = params
        self.label_scaling = label_scaling or LabelScaling()

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int) -> "LcsVae":
        rng = stream(seed, "init")
        head = 2 * config.latent_dim
        h = config.hidden_units
        params = VaeParams(
            prior_net=Mlp.initialize(
                "prior", Mlp.layer_sizes(config.n_domains, head, config.prior_layers, h), rng, zero_last=True
            ),
            encoder_net=Mlp.initialize(
                "encoder", Mlp.layer_sizes(config.d_x + config.n_domains, head, config.encoder_layers, h), rng
            ),
            decoder_net=Mlp.initialize(
                "decoder", Mlp.layer_sizes(config.latent_dim, config.d_x, config.decoder_layers, h), rng
            ),
            classifier_net=Mlp.initialize(
                "classifier", Mlp.layer_sizes(config.d_c, config.output_dim, config.classifier_layers, h), rng
            ),
            beta=config.beta,
            lam=config.lam,
            gamma=config.gamma,
            task=config.task,
        )
        return cls(config, params)

    # --- Parameter plumbing ---

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return self.params.named_parameters()

    def parameters(self) -> list[Tensor]:
        return self.params.parameters()

    def with_parameters(self, tensors: Sequence[Tensor]) -> "LcsVae":
        """Same architecture bound to `tensors`, given in `parameters()` order."""
        names = [name for name, _ in self.named_parameters()]
        if len(tensors) != len(names):
            raise ModelError(f"expected {len(names)} parameter tensors, got {len(tensors)}")
        return LcsVae(self.config, self.params.rebind(dict(zip(names, tensors))), self.label_scaling)

    def with_label_scaling(self, label_scaling: LabelScaling) -> "LcsVae":
        return LcsVae(self.config, self.params, label_scaling)

    def frozen(self) -> "LcsVae":
        return self.with_parameters([Tensor(p.data) for p in self.parameters()])

    # --- Checks ---

    def _check_onehot(self, u: np.ndarray):
        u = np.asarray(u)
        if u.ndim != 2 or u.shape[1] != self.config.n_domains:
            raise ModelError(f"domain one-hot must be n x {self.config.n_domains}, got {u.shape}")
        if not (np.all((u == 0.0) | (u == 1.0)) and np.all(u.sum(axis=1) == 1.0)):
            raise ModelError("domain indicator rows must contain exactly one 1")

    def _check_x(self, x: np.ndarray):
        if x.ndim != 2 or x.shape[1] != self.config.d_x:
            raise ModelError(f"x must be n x {self.config.d_x}, got {x.shape}")

    def _split_heads(self, out: Tensor) -> tuple[GaussianParams, GaussianParams]:
        d_c, d_s = self.config.d_c, self.config.d_s
        cols = lambda a, b: apply("slice_cols", [out], start=a, stop=b)  # noqa: E731
        content = GaussianParams.from_raw(cols(0, d_c), cols(d_c, 2 * d_c))
        style = GaussianParams.from_raw(cols(2 * d_c, 2 * d_c + d_s), cols(2 * d_c + d_s, 2 * (d_c + d_s)))
        return content, style

    # --- Networks ---

    def prior(self, u: np.ndarray) -> tuple[GaussianParams, GaussianParams]:
        self._check_onehot(u)
        return self._split_heads(self.params.prior_net(Tensor(u)))

    def encode(self, x: np.ndarray, u: np.ndarray) -> tuple[GaussianParams, GaussianParams]:
        self._check_x(x)
        self._check_onehot(u)
        if x.shape[0] != u.shape[0]:
            raise ModelError(f"x has {x.shape[0]} rows, domain one-hot has {u.shape[0]}")
        inputs = apply("concat_cols", [Tensor(x), Tensor(u)])
        return self._split_heads(self.params.encoder_net(inputs))

    def decode(self, n_c: Tensor, n_s: Tensor) -> Tensor:
        return self.params.decoder_net(apply("concat_cols", [n_c, n_s]))

    def classify(self, n_c: Tensor) -> Tensor:
        """Class logits or the regression mean (n x 1) from the content block only."""
        if n_c.shape[-1] != self.config.d_c:
            raise ModelError(f"classifier expects {self.config.d_c} content dims, got {n_c.shape}")
        return self.params.classifier_net(n_c)

    # --- Inference ---

    def posterior_mean(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        content, _ = self.frozen().encode(x, u)
        return content.mean.data.copy()

    def predict(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Label probabilities (n x C) or raw-scale regression means (n,) from the posterior content mean."""
        model = self.frozen()
        content, _ = model.encode(x, u)
        out = model.classify(content.mean)
        if self.config.task == "classification":
            return apply("softmax_rows", [out]).data.copy()
        return self.label_scaling.inverse(out.data[:, 0].copy())
