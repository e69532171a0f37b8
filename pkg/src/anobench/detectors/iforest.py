from __future__ import annotations

import math

import numpy as np
from scipy.special import digamma

from .base import BaseDetector


def average_path_length(m) -> np.ndarray:
    """Expected unsuccessful-search path length c(m) of a binary search tree on m points."""
    m = np.asarray(m, dtype=np.float64)
    out = np.zeros_like(m)
    big = m > 2
    harmonic = digamma(m[big]) + np.euler_gamma  # H(m - 1)
    out[big] = 2.0 * harmonic - 2.0 * (m[big] - 1.0) / m[big]
    out[m == 2] = 1.0
    return out


class _IsolationTree:
    """Array-backed isolation tree; leaves have ``feature == -1``."""

    def __init__(self, X: np.ndarray, max_depth: int, rng: np.random.Generator):
        feature, threshold, left, right, size, depth = [], [], [], [], [], []

        def new_node(d):
            for arr in (feature, left, right, size):
                arr.append(-1)
            threshold.append(0.0)
            depth.append(d)
            return len(feature) - 1

        stack = [(new_node(0), np.arange(len(X)))]
        while stack:
            node, rows = stack.pop()
            d = depth[node]
            size[node] = len(rows)
            if d >= max_depth or len(rows) <= 1:
                continue
            sub = X[rows]
            lo, hi = sub.min(0), sub.max(0)
            candidates = np.flatnonzero(hi > lo)
            if len(candidates) == 0:
                continue
            f = int(candidates[rng.integers(len(candidates))])
            t = float(rng.uniform(lo[f], hi[f]))
            go_left = sub[:, f] < t
            feature[node] = f
            threshold[node] = t
            left[node] = new_node(d + 1)
            right[node] = new_node(d + 1)
            stack.append((right[node], rows[~go_left]))
            stack.append((left[node], rows[go_left]))

        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.leaf_path = np.array(depth, dtype=np.float64) + average_path_length(size)

    def path_length(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] < self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] >= 0
        return self.leaf_path[node]


class IForest(BaseDetector):
    """Isolation forest; score ``2 ** (-E[h(x)] / c(psi))`` lies in (0, 1]."""

    name = "iforest"
    defaults = {"n_trees": 100, "subsample": 256}

    def _check_params(self, p):
        for key in ("n_trees", "subsample"):
            if int(p[key]) != p[key] or p[key] < 1:
                raise ValueError(f"iforest: {key} must be a positive integer, got {p[key]}")

    def _fit(self, X, y, mask, seed):
        rng = np.random.default_rng(seed)
        psi = min(self.params["subsample"], len(X))
        max_depth = math.ceil(math.log2(psi)) if psi > 1 else 0
        self.psi_ = psi
        self.trees_ = []
        for _ in range(self.params["n_trees"]):
            rows = rng.choice(len(X), size=psi, replace=False)
            self.trees_.append(_IsolationTree(X[rows], max_depth, rng))

    def _score(self, X):
        mean_path = np.mean([t.path_length(X) for t in self.trees_], axis=0)
        norm = float(average_path_length(self.psi_))
        if norm == 0.0:
            return np.ones(len(X))
        return 2.0 ** (-mean_path / norm)


def iforest_score(train, X, n_trees: int = 100, subsample: int = 256, seed: int = 0) -> np.ndarray:
    return IForest(n_trees=n_trees, subsample=subsample).fit(train, seed=seed).score(X)
