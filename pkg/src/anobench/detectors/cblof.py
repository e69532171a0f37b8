from __future__ import annotations

import numpy as np

from ..cluster import kmeans, sq_dists
from ..errors import KTooLarge
from .base import BaseDetector


def large_cluster_count(sizes, alpha: float, beta: float) -> int:
    """Number of leading clusters (sorted by size, descending) that count as large.

    The boundary is the first position where the clusters so far cover at
    least ``alpha`` of the points, or where the next cluster is at least
    ``beta`` times smaller.
    """
    sizes = np.asarray(sizes, dtype=float)
    total = sizes.sum()
    covered = np.cumsum(sizes)
    for b in range(len(sizes)):
        if covered[b] >= alpha * total:
            return b + 1
        if b + 1 < len(sizes) and sizes[b + 1] > 0 and sizes[b] / sizes[b + 1] >= beta:
            return b + 1
    return len(sizes)


class CBLOF(BaseDetector):
    """Cluster-based local outlier factor, unweighted variant.

    Score is the distance to the nearest centroid among the large clusters.
    """

    name = "cblof"
    defaults = {"n_clusters": 8, "alpha": 0.9, "beta": 5.0}

    def _check_params(self, p):
        if int(p["n_clusters"]) != p["n_clusters"] or p["n_clusters"] < 1:
            raise ValueError(f"cblof: n_clusters must be a positive integer, got {p['n_clusters']}")
        if not 0.5 <= p["alpha"] <= 1.0:
            raise ValueError(f"cblof: alpha must be in [0.5, 1], got {p['alpha']}")
        if p["beta"] <= 1.0:
            raise ValueError(f"cblof: beta must exceed 1, got {p['beta']}")

    def _fit(self, X, y, mask, seed):
        k = self.params["n_clusters"]
        if k > len(X):
            raise KTooLarge(f"cblof: {k} clusters but only {len(X)} training rows")
        km = kmeans(X, k, seed=seed)
        sizes = np.bincount(km.labels, minlength=k)
        order = np.argsort(-sizes, kind="stable")
        n_large = large_cluster_count(sizes[order], self.params["alpha"], self.params["beta"])
        self.cluster_centers_ = km.centers
        self.cluster_sizes_ = sizes
        self.large_centers_ = km.centers[order[:n_large]]

    def _score(self, X):
        return np.sqrt(sq_dists(X, self.large_centers_).min(axis=1))


def cblof_score(train, X, n_clusters: int = 8, alpha: float = 0.9, beta: float = 5.0,
                seed: int = 0) -> np.ndarray:
    return CBLOF(n_clusters=n_clusters, alpha=alpha, beta=beta).fit(train, seed=seed).score(X)
