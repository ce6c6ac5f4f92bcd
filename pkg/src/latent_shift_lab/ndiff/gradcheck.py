# latent-shift-lab/src/latent_shift_lab/ndiff/gradcheck.py

from typing import Callable, Sequence

import numpy as np

from ..core.errors import ConfigError, NumericError
from .tensor import OP_KINDS, Tensor, apply, backward

ScalarFn = Callable[[list[Tensor]], Tensor]


def _evaluate(f: ScalarFn, arrays: Sequence[np.ndarray]) -> float:
    out = f([Tensor(a) for a in arrays])
    value = out.item()
    if not np.isfinite(value):
        raise NumericError(f"function is non-finite ({value}) at a perturbed point")
    return value


def numerical_gradient(f: ScalarFn, point: Sequence[np.ndarray], eps: float = 1e-5) -> list[np.ndarray]:
    """Central differences, one coordinate at a time."""
    base = [np.array(p, dtype=np.float64) for p in point]
    grads = []
    for i, arr in enumerate(base):
        grad = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            original = arr[idx]
            arr[idx] = original + eps
            plus = _evaluate(f, base)
            arr[idx] = original - eps
            minus = _evaluate(f, base)
            arr[idx] = original
            grad[idx] = (plus - minus) / (2.0 * eps)
        grads.append(grad)
    return grads


def grad_check(f: ScalarFn, point: Sequence[np.ndarray], eps: float = 1e-5) -> float:
    """
    Max over coordinates of |analytic - central difference| / max(1, |analytic|).

    `f` must be deterministic: any sampling noise has to be fixed outside it.
    """
    if not 0.0 < eps <= 1e-2:
        raise ConfigError(f"eps must lie in (0, 1e-2], got {eps}")

    params = [Tensor(p, requires_grad=True) for p in point]
    out = f(params)
    if not np.isfinite(out.item()):
        raise NumericError(f"function is non-finite ({out.item()}) at the check point")
    analytic = backward(out, params)
    numeric = numerical_gradient(f, point, eps)

    worst = 0.0
    for p, num in zip(params, numeric):
        a = analytic[p]
        err = np.abs(a - num) / np.maximum(1.0, np.abs(a))
        worst = max(worst, float(err.max()))
    return worst


# --- Per-op suite ---

def _away_from(rng: np.random.Generator, shape, kink: float, margin: float = 0.1) -> np.ndarray:
    """Values at least `margin` from `kink` so finite differences never straddle it."""
    magnitude = rng.uniform(margin, 1.0, size=shape)
    return kink + np.where(rng.random(shape) < 0.5, -magnitude, magnitude)


def _op_cases(rng: np.random.Generator) -> dict[str, tuple[ScalarFn, list[np.ndarray]]]:
    def weighted(kind: str, out_shape, **attrs) -> ScalarFn:
        weights = rng.normal(size=out_shape)
        return lambda ts: apply("sum", [apply("mul", [apply(kind, ts, **attrs), weights])])

    a34, b14 = rng.normal(size=(3, 4)), rng.normal(size=(1, 4))
    clip_point = np.where(rng.random((3, 4)) < 0.5, rng.uniform(-0.4, 0.4, (3, 4)), _away_from(rng, (3, 4), 0.0, 0.6))
    return {
        "matmul": (weighted("matmul", (3, 2)), [a34, rng.normal(size=(4, 2))]),
        "add": (weighted("add", (3, 4)), [a34, b14]),
        "sub": (weighted("sub", (3, 4)), [a34, b14]),
        "mul": (weighted("mul", (3, 4)), [a34, b14]),
        "div": (weighted("div", (3, 4)), [a34, _away_from(rng, (3, 4), 0.0, 0.5)]),
        "tanh": (weighted("tanh", (3, 4)), [a34]),
        "leaky_relu": (weighted("leaky_relu", (3, 4)), [_away_from(rng, (3, 4), 0.0)]),
        "exp": (weighted("exp", (3, 4)), [a34]),
        "log": (weighted("log", (3, 4)), [rng.uniform(0.5, 2.0, size=(3, 4))]),
        "square": (weighted("square", (3, 4)), [a34]),
        "sum": (weighted("sum", (1, 4), axis=0), [a34]),
        "mean": (weighted("mean", (3, 1), axis=1), [a34]),
        "softmax_rows": (weighted("softmax_rows", (3, 4)), [a34]),
        "log_softmax_rows": (weighted("log_softmax_rows", (3, 4)), [a34]),
        "concat_cols": (weighted("concat_cols", (3, 5)), [rng.normal(size=(3, 2)), rng.normal(size=(3, 3))]),
        "slice_cols": (weighted("slice_cols", (3, 3), start=1, stop=4), [rng.normal(size=(3, 5))]),
        "transpose": (weighted("transpose", (4, 3)), [a34]),
        "clip": (weighted("clip", (3, 4), lo=-0.5, hi=0.5), [clip_point]),
    }


def op_gradchecks(seed: int = 0, eps: float = 1e-5) -> dict[str, float]:
    """Max relative gradient error of every op kind at a random point away from kinks."""
    cases = _op_cases(np.random.default_rng(seed))
    missing = set(OP_KINDS) - set(cases)
    if missing:
        raise ConfigError(f"no gradient check case for ops {sorted(missing)}")
    return {kind: grad_check(cases[kind][0], cases[kind][1], eps) for kind in OP_KINDS}
