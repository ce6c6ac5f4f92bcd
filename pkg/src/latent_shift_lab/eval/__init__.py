from .metrics import (
    empirical_label_distribution,
    evaluate,
    label_kl,
    label_kl_matrix,
    match_components,
    mcc,
    mcc_matching,
    pearson,
    target_metrics,
)

__all__ = [
    "empirical_label_distribution",
    "evaluate",
    "label_kl",
    "label_kl_matrix",
    "match_components",
    "mcc",
    "mcc_matching",
    "pearson",
    "target_metrics",
]
