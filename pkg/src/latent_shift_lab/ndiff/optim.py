# latent-shift-lab/src/latent_shift_lab/ndiff/optim.py

"""
Adam adaptive moment estimation.

    t += 1
    m(t) = b1 * m(t - 1) + (1 - b1) * g
    v(t) = b2 * v(t - 1) + (1 - b2) * g**2
    m'(t) = m(t) / (1 - b1**t)
    v'(t) = v(t) / (1 - b2**t)
    theta(t) = theta(t - 1) - lr * m'(t) / (sqrt(v'(t)) + eps)
"""

from typing import Sequence

import numpy as np

from ..core.errors import ConfigError, ShapeError
from ..models.adam_state import AdamState
from .tensor import Tensor

DEFAULT_LR = 1e-3
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float = DEFAULT_LR,
    beta1: float = DEFAULT_BETA1,
    beta2: float = DEFAULT_BETA2,
    eps: float = DEFAULT_EPS,
) -> tuple[list[np.ndarray], AdamState]:
    """Pure Adam update; returns new parameter arrays and a new state."""
    if lr <= 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if not (len(params) == len(grads) == len(state.m)):
        raise ShapeError("adam_step (parameter count)", (len(params),), (len(grads),), (len(state.m),))

    t = state.step_count + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if not (p.shape == g.shape == m.shape):
            raise ShapeError("adam_step", p.shape, g.shape, m.shape)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(step_count=t, m=new_m, v=new_v)


class Adam:
    """Optimizer over tracked tensors; each step swaps in the updated arrays."""

    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float = DEFAULT_LR,
        beta1: float = DEFAULT_BETA1,
        beta2: float = DEFAULT_BETA2,
        eps: float = DEFAULT_EPS,
        state: AdamState | None = None,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = state or AdamState.fresh([p.data for p in self.params])

    def step(self, grads: Sequence[np.ndarray] | None = None):
        if grads is None:
            grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        new_values, self.state = adam_step(
            [p.data for p in self.params], grads, self.state, self.lr, self.beta1, self.beta2, self.eps
        )
        for p, value in zip(self.params, new_values):
            p.data = value

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()
