"""Label-informed detectors: Gaussian naive Bayes and a CART random forest.

Both train on a binary target (see :func:`~anobench.detectors.base.training_target`)
and score with the predicted probability of the anomaly class.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .base import BaseDetector


class GaussianNB(BaseDetector):
    name = "gnb"
    label_informed = True
    defaults = {"var_smoothing": 1e-9}

    def _check_params(self, p):
        if p["var_smoothing"] < 0:
            raise ValueError("gnb: var_smoothing must be non-negative")

    def _fit(self, X, y, mask, seed):
        eps = self.params["var_smoothing"] * X.var(axis=0).max()
        self.theta_ = np.array([X[y == c].mean(0) for c in (0, 1)])
        self.var_ = np.array([X[y == c].var(0) for c in (0, 1)]) + eps
        if np.any(self.var_ <= 0):
            # both classes constant on some feature; any positive floor keeps the likelihood defined
            self.var_ = np.maximum(self.var_, 1e-300)
        self.log_prior_ = np.log(np.bincount(y, minlength=2) / len(y))

    def _score(self, X):
        joint = np.empty((len(X), 2))
        for c in (0, 1):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            ll = ll - 0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            joint[:, c] = self.log_prior_[c] + ll
        return np.exp(joint[:, 1] - logsumexp(joint, axis=1))


def _best_split(X, y, features):
    """Lowest weighted-Gini threshold split over ``features``; None if no split exists."""
    n = len(y)
    total_pos = y.sum()
    best = (math.inf, -1, 0.0)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        pos_left = np.cumsum(y[order])[:-1]
        n_left = np.arange(1, n)
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        n_right = n - n_left
        pos_right = total_pos - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        # weighted Gini up to the constant 1/n: n_l*2p_l(1-p_l) + n_r*2p_r(1-p_r)
        cost = n_left * p_l * (1 - p_l) + n_right * p_r * (1 - p_r)
        cost = np.where(valid, cost, math.inf)
        i = int(np.argmin(cost))
        if cost[i] < best[0]:
            t = 0.5 * (xs[i] + xs[i + 1])
            if not t < xs[i + 1]:
                # midpoint rounded onto the upper value
                t = xs[i]
            best = (cost[i], int(f), t)
    if best[1] < 0:
        return None
    return best[1], best[2]


class DecisionTree:
    """Gini CART grown until leaves are pure or hold a single sample."""

    def __init__(self, max_features: int, rng: np.random.Generator):
        self.max_features = max_features
        self.rng = rng

    def fit(self, X, y):
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(rows):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(y[rows].mean()))
            return len(feature) - 1

        stack = [(new_node(np.arange(len(y))), np.arange(len(y)))]
        while stack:
            node, rows = stack.pop()
            ys = y[rows]
            if len(rows) < 2 or ys.min() == ys.max():
                continue
            sub = X[rows]
            varying = np.flatnonzero(sub.max(0) > sub.min(0))
            if len(varying) == 0:
                continue
            m = min(self.max_features, len(varying))
            feats = self.rng.choice(varying, size=m, replace=False)
            split = _best_split(sub, ys, feats)
            if split is None:
                continue
            f, t = split
            go_left = sub[:, f] <= t
            feature[node] = f
            threshold[node] = t
            left[node] = new_node(rows[go_left])
            right[node] = new_node(rows[~go_left])
            stack.append((right[node], rows[~go_left]))
            stack.append((left[node], rows[go_left]))

        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.value = np.array(value)
        return self

    def predict(self, X):
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] >= 0
        return self.value[node]


class RandomForest(BaseDetector):
    """Bootstrap-aggregated CART trees with ``ceil(sqrt(d))`` candidate features per split."""

    name = "rforest"
    label_informed = True
    defaults = {"n_trees": 100}

    def _check_params(self, p):
        if int(p["n_trees"]) != p["n_trees"] or p["n_trees"] < 1:
            raise ValueError(f"rforest: n_trees must be a positive integer, got {p['n_trees']}")

    def _fit(self, X, y, mask, seed):
        rng = np.random.default_rng(seed)
        n, d = X.shape
        max_features = math.ceil(math.sqrt(d))
        self.trees_ = []
        for _ in range(self.params["n_trees"]):
            rows = rng.integers(0, n, size=n)
            self.trees_.append(DecisionTree(max_features, rng).fit(X[rows], y[rows]))

    def _score(self, X):
        return np.mean([t.predict(X) for t in self.trees_], axis=0)


def gnb_fit_predict(train, y_train, X, var_smoothing: float = 1e-9) -> np.ndarray:
    return GaussianNB(var_smoothing=var_smoothing).fit(train, y_train).score(X)


def rforest_fit_predict(train, y_train, X, n_trees: int = 100, seed: int = 0) -> np.ndarray:
    return RandomForest(n_trees=n_trees).fit(train, y_train, seed=seed).score(X)
