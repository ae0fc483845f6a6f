"""Chunk-wise gradient-boosting feature selection."""

from ._cafegb import (
    DataError,
    GbdtModel,
    GbdtParams,
    UsageError,
    accuracy,
    correlation_stats,
    f1,
    jaccard,
    make_synthetic,
    mcc,
    plan_chunks,
    pr_auc,
    roc_auc,
    run_cli,
    select_budget,
    select_features,
    stability,
    train_gbdt,
    tree_shap,
    wilcoxon,
)

__all__ = [
    "DataError",
    "GbdtModel",
    "GbdtParams",
    "UsageError",
    "accuracy",
    "correlation_stats",
    "f1",
    "jaccard",
    "make_synthetic",
    "mcc",
    "plan_chunks",
    "pr_auc",
    "roc_auc",
    "run_cli",
    "select_budget",
    "select_features",
    "stability",
    "top_k",
    "train_gbdt",
    "tree_shap",
    "wilcoxon",
]


def top_k(order, k):
    """First k features of a ranking, sorted ascending."""
    return sorted(int(i) for i in order[:k])
