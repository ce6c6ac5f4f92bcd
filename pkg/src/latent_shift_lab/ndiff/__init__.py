from .gradcheck import grad_check, numerical_gradient, op_gradchecks
from .optim import Adam, adam_step
from .tensor import OP_KINDS, Tensor, apply, as_tensor, backward

__all__ = [
    "Adam",
    "OP_KINDS",
    "Tensor",
    "adam_step",
    "apply",
    "as_tensor",
    "backward",
    "grad_check",
    "numerical_gradient",
    "op_gradchecks",
]
