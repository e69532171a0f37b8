"""Distance-based detectors: k-th nearest neighbour distance and LOF."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..core import as_matrix
from ..errors import KTooLarge
from .base import BaseDetector

KDTREE_MAX_DIM = 16
_CHUNK_CELLS = 4_000_000


def brute_kneighbors(train: np.ndarray, X: np.ndarray, k: int):
    """Exact k nearest training rows for every row of ``X`` by full scan.

    Distances come from explicit coordinate differences, so a query equal to a
    training row gets distance exactly 0. Ties are broken by training index.
    """
    n, d = train.shape
    rows = max(1, _CHUNK_CELLS // max(1, n * d))
    dist = np.empty((len(X), k))
    idx = np.empty((len(X), k), dtype=np.int64)
    for start in range(0, len(X), rows):
        q = X[start:start + rows]
        sq = ((q[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
        part = np.argsort(sq, axis=1, kind="stable")[:, :k]
        idx[start:start + rows] = part
        dist[start:start + rows] = np.sqrt(np.take_along_axis(sq, part, axis=1))
    return dist, idx


def kneighbors(train, X, k: int, method: str = "auto"):
    """k nearest neighbours of each query among ``train``, nearest first.

    ``method`` is ``"brute"``, ``"kdtree"`` or ``"auto"`` (k-d tree when the
    dimensionality is at most 16).
    """
    train = as_matrix(train, "train")
    X = as_matrix(X)
    if k < 1 or k > len(train):
        raise KTooLarge(f"k={k} must be in [1, {len(train)}]")
    if method == "auto":
        method = "kdtree" if train.shape[1] <= KDTREE_MAX_DIM else "brute"
    if method == "brute":
        return brute_kneighbors(train, X, k)
    if method != "kdtree":
        raise ValueError(f"unknown neighbour search method {method!r}")
    dist, idx = cKDTree(train).query(X, k=k)
    return dist.reshape(len(X), k), idx.reshape(len(X), k).astype(np.int64)


def kneighbors_excluding_self(train, k: int, method: str = "auto"):
    """Neighbours of each training row among the *other* training rows."""
    n = len(train)
    if k < 1 or k >= n:
        raise KTooLarge(f"k={k} must be in [1, {n - 1}] for self-excluded search")
    dist, idx = kneighbors(train, train, k + 1, method)
    own = idx == np.arange(n)[:, None]
    # a duplicate may displace the row itself from the k+1 list; drop the last then
    own[~own.any(axis=1), -1] = True
    keep = ~own
    return dist[keep].reshape(n, k), idx[keep].reshape(n, k)


class KNN(BaseDetector):
    """Score = Euclidean distance to the k-th nearest training row."""

    name = "knn"
    defaults = {"k": 5, "method": "auto"}

    def _check_params(self, p):
        if int(p["k"]) != p["k"] or p["k"] < 1:
            raise ValueError(f"knn: k must be a positive integer, got {p['k']}")

    def _fit(self, X, y, mask, seed):
        if self.params["k"] > len(X):
            raise KTooLarge(f"knn: k={self.params['k']} exceeds {len(X)} training rows")
        self.train_ = X

    def _score(self, X):
        dist, _ = kneighbors(self.train_, X, self.params["k"], self.params["method"])
        return dist[:, -1]


class LOF(BaseDetector):
    """Local outlier factor, fitted on the training rows and applied inductively.

    Training k-distances and local reachability densities use self-excluded
    neighbourhoods. A query's neighbourhood is its k nearest training rows.
    Mean reachability distances are floored at 1e-10, so a fully coincident
    neighbourhood has a huge but finite density and the ratio of two such
    densities is exactly 1.
    """

    name = "lof"
    defaults = {"k": 20, "method": "auto"}
    _EPS = 1e-10

    def _check_params(self, p):
        if int(p["k"]) != p["k"] or p["k"] < 1:
            raise ValueError(f"lof: k must be a positive integer, got {p['k']}")

    def _fit(self, X, y, mask, seed):
        k = self.params["k"]
        if k >= len(X):
            raise KTooLarge(f"lof: k={k} must be smaller than {len(X)} training rows")
        dist, idx = kneighbors_excluding_self(X, k, self.params["method"])
        self.train_ = X
        self.k_distance_ = dist[:, -1]
        self.lrd_ = self._lrd(dist, idx)

    def _lrd(self, dist, idx):
        reach = np.maximum(dist, self.k_distance_[idx])
        return 1.0 / (reach.mean(axis=1) + self._EPS)

    def _score(self, X):
        dist, idx = kneighbors(self.train_, X, self.params["k"], self.params["method"])
        lrd = self._lrd(dist, idx)
        return self.lrd_[idx].mean(axis=1) / lrd


def knn_score(train, X, k: int = 5) -> np.ndarray:
    return KNN(k=k).fit(train).score(X)


def lof_score(train, X, k: int = 20) -> np.ndarray:
    return LOF(k=k).fit(train).score(X)
