from .solver import marginals_from_scores, pairwise_kl, solve_marginals
from .subsample import (
    ResampleResult,
    as_classification,
    class_counts,
    domain_scale,
    resample_spec_from_dataset,
    save_marginals,
    subsample,
)

__all__ = [
    "ResampleResult",
    "as_classification",
    "class_counts",
    "domain_scale",
    "marginals_from_scores",
    "pairwise_kl",
    "resample_spec_from_dataset",
    "save_marginals",
    "solve_marginals",
    "subsample",
]
