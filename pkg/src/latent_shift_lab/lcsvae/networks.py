# latent-shift-lab/src/latent_shift_lab/lcsvae/networks.py

from typing import Mapping

import numpy as np

from ..ndiff import Tensor, apply


class Mlp:
    """Fully connected network: affine layers with leaky ReLU between them."""

    def __init__(self, name: str, weights: list[Tensor], biases: list[Tensor]):
        self.name = name
        self.weights = weights
        self.biases = biases

    @classmethod
    def initialize(cls, name: str, sizes: list[int], rng: np.random.Generator, zero_last: bool = False) -> "Mlp":
        weights, biases = [], []
        last = len(sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            if zero_last and i == last:
                w = np.zeros((fan_in, fan_out))
            else:
                w = rng.normal(0.0, np.sqrt(2.0 / (fan_in + fan_out)), size=(fan_in, fan_out))
            weights.append(Tensor(w, requires_grad=True, name=f"{name}.{i}.weight"))
            biases.append(Tensor(np.zeros((1, fan_out)), requires_grad=True, name=f"{name}.{i}.bias"))
        return cls(name, weights, biases)

    @staticmethod
    def layer_sizes(d_in: int, d_out: int, layers: int, hidden: int) -> list[int]:
        return [d_in] + [hidden] * (layers - 1) + [d_out]

    @property
    def in_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_features(self) -> int:
        return self.weights[-1].shape[1]

    def __call__(self, h: Tensor) -> Tensor:
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = apply("add", [apply("matmul", [h, w]), b])
            if i < last:
                h = apply("leaky_relu", [h])
        return h

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        out = []
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out.append((f"{self.name}.{i}.weight", w))
            out.append((f"{self.name}.{i}.bias", b))
        return out

    def rebind(self, tensors: Mapping[str, Tensor]) -> "Mlp":
        weights = [tensors[f"{self.name}.{i}.weight"] for i in range(len(self.weights))]
        biases = [tensors[f"{self.name}.{i}.bias"] for i in range(len(self.biases))]
        return Mlp(self.name, weights, biases)
