# latent-shift-lab/src/latent_shift_lab/scm/functions.py

"""
Randomly generated component functions of the latent causal model.

    z_c = g_c(n_c)
    z_s = g_s2(g_s1(z_c) + n_s)
    x   = f(z_c, z_s) + eps
"""

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.constants import LEAKY_RELU_SLOPE, MIXING_CONDITION_LIMIT, MIXING_MAX_ATTEMPTS
from ..core.errors import ScmError


class MonotoneMap(BaseModel):
    """Elementwise g(n) = offset + slope * n + bend * tanh(n), with |bend| < slope."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    offset: np.ndarray
    slope: np.ndarray
    bend: np.ndarray

    def __call__(self, n: np.ndarray) -> np.ndarray:
        return self.offset + self.slope * n + self.bend * np.tanh(n)

    def derivative(self, n: np.ndarray) -> np.ndarray:
        t = np.tanh(n)
        return self.slope + self.bend * (1.0 - t * t)

    def inverse(self, z: np.ndarray, tol: float = 1e-15, max_iter: int = 200) -> np.ndarray:
        # Fixed point n = (z - offset - bend*tanh(n)) / slope contracts with ratio |bend|/slope.
        n = (z - self.offset) / self.slope
        for _ in range(max_iter):
            updated = (z - self.offset - self.bend * np.tanh(n)) / self.slope
            if np.max(np.abs(updated - n)) <= tol * max(1.0, float(np.max(np.abs(n)))):
                return updated
            n = updated
        return n

    @classmethod
    def identity(cls, dim: int) -> "MonotoneMap":
        return cls(offset=np.zeros(dim), slope=np.ones(dim), bend=np.zeros(dim))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        dim: int,
        offset_range: tuple[float, float] = (0.5, 1.0),
        slope_range: tuple[float, float] = (0.8, 1.5),
        bend_ratio: float = 0.25,
    ) -> "MonotoneMap":
        slope = rng.uniform(*slope_range, size=dim)
        return cls(
            offset=rng.uniform(*offset_range, size=dim),
            slope=slope,
            bend=rng.uniform(-bend_ratio, bend_ratio, size=dim) * slope,
        )


class CubicCoupling(BaseModel):
    """g_s1(z_c) = (z_c ** 3) @ weights, mapping the content block into the style block."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray

    def __call__(self, z_c: np.ndarray) -> np.ndarray:
        return (z_c ** 3) @ self.weights

    @classmethod
    def identity(cls, dim: int) -> "CubicCoupling":
        return cls(weights=np.eye(dim))

    @classmethod
    def random(cls, rng: np.random.Generator, d_c: int, d_s: int) -> "CubicCoupling":
        weights = rng.uniform(-0.1, 0.1, size=(d_c, d_s))
        diag = min(d_c, d_s)
        weights[np.arange(diag), np.arange(diag)] = rng.uniform(1.0, 2.0, size=diag)
        return cls(weights=weights)


class MixingMlp(BaseModel):
    """Leaky-ReLU network without biases; every weight matrix is well conditioned."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: list[np.ndarray]
    slope: float = LEAKY_RELU_SLOPE

    def __call__(self, z: np.ndarray) -> np.ndarray:
        h = z
        last = len(self.weights) - 1
        for i, w in enumerate(self.weights):
            h = h @ w
            if i < last:
                h = np.where(h > 0, h, self.slope * h)
        return h

    @classmethod
    def random(cls, rng: np.random.Generator, d_in: int, d_out: int, depth: int) -> "MixingMlp":
        # First layer lifts d_in to d_out (rank d_in, injective); later layers are square d_out x d_out.
        # The condition cap applies to the rectangular layer through its singular values.
        shapes = [(d_in, d_out)] + [(d_out, d_out)] * (depth - 1)
        weights = [_well_conditioned(rng, shape, layer) for layer, shape in enumerate(shapes)]
        return cls(weights=weights)


def _well_conditioned(rng: np.random.Generator, shape: tuple[int, int], layer: int) -> np.ndarray:
    for _ in range(MIXING_MAX_ATTEMPTS):
        w = rng.normal(0.0, 1.0 / np.sqrt(shape[0]), size=shape)
        if np.linalg.cond(w) < MIXING_CONDITION_LIMIT:
            return w
    raise ScmError(
        f"could not draw mixing layer {layer} {shape} with condition number < {MIXING_CONDITION_LIMIT:g} "
        f"after {MIXING_MAX_ATTEMPTS} attempts"
    )
