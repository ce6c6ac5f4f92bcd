# latent-shift-lab/src/latent_shift_lab/resampler/solver.py

"""
Per-domain label marginals with a prescribed pairwise KL.

Each distribution is parameterized as p = floor + (1 - C * floor) * softmax(s)
over free scores s, and the scores are fitted with Adam on

    sum over ordered pairs i != j of (KL(p_i || p_j) - target)^2
"""

import logging

import numpy as np

from ..core.constants import (
    DIRICHLET_CONCENTRATION,
    KL_EARLY_EXIT,
    KL_TOLERANCE,
    MARGINAL_FLOOR,
    SOLVER_LEARNING_RATE,
    SOLVER_MAX_ITERATIONS,
)
from ..core.errors import NonConvergenceError, ResampleError
from ..eval.metrics import label_kl
from ..models import MarginalSet, ResampleSpec
from ..ndiff import Adam, Tensor, apply, backward
from ..scm.seeds import stream

logger = logging.getLogger(__name__)


def marginals_from_scores(scores: Tensor, floor: float = MARGINAL_FLOOR) -> Tensor:
    C = scores.shape[1]
    return apply("add", [apply("mul", [apply("softmax_rows", [scores]), 1.0 - C * floor]), floor])


def pairwise_kl(p: Tensor) -> Tensor:
    """K x K matrix with entry (i, j) = KL(p_i || p_j)."""
    log_p = apply("log", [p])
    self_term = apply("sum", [apply("mul", [p, log_p])], axis=1)
    cross = apply("matmul", [p, apply("transpose", [log_p])])
    return apply("sub", [self_term, cross])


def kl_objective(scores: Tensor, target: float) -> tuple[Tensor, np.ndarray]:
    kl = pairwise_kl(marginals_from_scores(scores))
    K = scores.shape[0]
    off_diagonal = 1.0 - np.eye(K)
    residual = apply("mul", [apply("sub", [kl, target]), off_diagonal])
    return apply("sum", [apply("square", [residual])]), np.abs(residual.data)


def _marginal_set(distributions: np.ndarray) -> MarginalSet:
    distributions = distributions / distributions.sum(axis=1, keepdims=True)
    K = distributions.shape[0]
    kl = [[label_kl(distributions[i], distributions[j]) for j in range(K)] for i in range(K)]
    return MarginalSet(distributions=distributions.tolist(), kl_matrix=kl)


def solve_marginals(
    spec: ResampleSpec,
    max_iterations: int = SOLVER_MAX_ITERATIONS,
    learning_rate: float = SOLVER_LEARNING_RATE,
) -> MarginalSet:
    """Deterministic per `spec.seed`; raises NonConvergenceError when no iterate gets within 0.05 of the target."""
    K, C, target = spec.K, spec.C, spec.target_kl
    if target == 0.0 or K == 1:
        return _marginal_set(np.full((K, C), 1.0 / C))
    if C == 1:
        raise ResampleError("a single class cannot realize a positive label KL")

    rng = stream(spec.seed, "marginals")
    init = rng.dirichlet(np.full(C, DIRICHLET_CONCENTRATION), size=K)
    scores = Tensor(np.log(init), requires_grad=True, name="scores")
    optimizer = Adam([scores], lr=learning_rate)

    best_residual, best_scores = np.inf, scores.data.copy()
    for iteration in range(max_iterations):
        loss, residual = kl_objective(scores, target)
        worst = float(residual.max())
        if worst < best_residual:
            best_residual, best_scores = worst, scores.data.copy()
        if worst <= KL_EARLY_EXIT:
            logger.debug("marginal solver converged after %d iterations", iteration)
            break
        optimizer.zero_grad()
        grads = backward(loss, [scores])
        optimizer.step([grads[scores]])
    else:
        loss, residual = kl_objective(scores, target)
        if float(residual.max()) < best_residual:
            best_residual, best_scores = float(residual.max()), scores.data.copy()

    if best_residual > KL_TOLERANCE:
        raise NonConvergenceError(f"no marginals with pairwise KL {target} after {max_iterations} iterations", best_residual)
    logger.info("solved %d x %d marginals for KL %.3f (max residual %.4f)", K, C, target, best_residual)
    return _marginal_set(marginals_from_scores(Tensor(best_scores)).data)
