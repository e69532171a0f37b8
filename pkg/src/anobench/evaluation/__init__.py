"""Metrics, stratified splitting, label subsampling and rank statistics."""

from .metrics import aucpr, aucroc, measure_timing
from .splits import stratified_indices, stratified_split, subsample_labels
from .stats import (
    CdResult,
    MetricRecord,
    RankTable,
    cd_analysis,
    cd_cliques,
    friedman_test,
    holm_adjust,
    rank_matrix,
    rank_rows,
    signed_rank_null,
    wilcoxon_signed_rank,
)

__all__ = [
    "aucroc", "aucpr", "measure_timing", "stratified_indices", "stratified_split",
    "subsample_labels", "MetricRecord", "RankTable", "CdResult", "rank_matrix", "rank_rows",
    "friedman_test", "wilcoxon_signed_rank", "signed_rank_null", "holm_adjust", "cd_cliques",
    "cd_analysis",
]
