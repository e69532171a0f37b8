"""Histogram-density detectors: HBOS (per feature) and LODA (random projections)."""

from __future__ import annotations

import math

import numpy as np

from .base import BaseDetector


class EqualWidthHistogram:
    """Equal-width histogram of one training column with max-normalised densities.

    Empty bins get density ``0.1 / n_train`` so ``-log(density)`` stays finite.
    A constant column collapses to one full bin of density 1.
    """

    def __init__(self, values: np.ndarray, n_bins: int):
        values = np.asarray(values, dtype=np.float64)
        self.lo = float(values.min())
        self.hi = float(values.max())
        self.n_bins = n_bins if self.hi > self.lo else 1
        self.floor = 0.1 / len(values)
        counts = np.bincount(self.bin_index(values), minlength=self.n_bins).astype(float)
        self.density = np.maximum(counts / counts.max(), self.floor)

    def bin_index(self, v: np.ndarray) -> np.ndarray:
        if self.n_bins == 1:
            return np.zeros(len(v), dtype=np.int64)
        pos = (v - self.lo) / (self.hi - self.lo) * self.n_bins
        # the right edge belongs to the last bin; outside values go to the edge bins
        return np.clip(np.floor(pos), 0, self.n_bins - 1).astype(np.int64)

    def neg_log_density(self, v: np.ndarray, outside: str = "edge") -> np.ndarray:
        out = -np.log(self.density[self.bin_index(v)])
        if outside == "empty":
            off = (v < self.lo) | (v > self.hi)
            out[off] = -math.log(self.floor)
        return out


class HBOS(BaseDetector):
    """Histogram-based outlier score: sum over features of -log(bin density)."""

    name = "hbos"
    defaults = {"n_bins": 10}

    def _check_params(self, p):
        if int(p["n_bins"]) != p["n_bins"] or p["n_bins"] < 1:
            raise ValueError(f"hbos: n_bins must be a positive integer, got {p['n_bins']}")

    def _fit(self, X, y, mask, seed):
        self.histograms_ = [EqualWidthHistogram(X[:, j], self.params["n_bins"])
                            for j in range(X.shape[1])]

    def _score(self, X):
        score = np.zeros(len(X))
        for j, h in enumerate(self.histograms_):
            score += h.neg_log_density(X[:, j])
        return score


def loda_bin_count(n_train: int) -> int:
    return int(min(100, max(10, math.ceil(math.sqrt(n_train)))))


class LODA(BaseDetector):
    """Ensemble of one-dimensional histograms on sparse random projections.

    Each projection vector has ``ceil(sqrt(d))`` non-zero standard normal
    entries and unit length. Projected values outside the training range are
    treated as falling in an empty bin.
    """

    name = "loda"
    defaults = {"n_projections": 100}

    def _check_params(self, p):
        if int(p["n_projections"]) != p["n_projections"] or p["n_projections"] < 1:
            raise ValueError(f"loda: n_projections must be a positive integer, got {p['n_projections']}")

    def _fit(self, X, y, mask, seed):
        rng = np.random.default_rng(seed)
        n, d = X.shape
        n_nonzero = math.ceil(math.sqrt(d))
        n_bins = loda_bin_count(n)
        W = np.zeros((self.params["n_projections"], d))
        for i in range(len(W)):
            cols = rng.choice(d, size=n_nonzero, replace=False)
            w = rng.standard_normal(n_nonzero)
            W[i, cols] = w / np.linalg.norm(w)
        P = X @ W.T
        self.projections_ = W
        self.histograms_ = [EqualWidthHistogram(P[:, i], n_bins) for i in range(len(W))]

    def _score(self, X):
        P = X @ self.projections_.T
        total = np.zeros(len(X))
        for i, h in enumerate(self.histograms_):
            total += h.neg_log_density(P[:, i], outside="empty")
        return total / len(self.histograms_)


def hbos_score(train, X, n_bins: int = 10) -> np.ndarray:
    return HBOS(n_bins=n_bins).fit(train).score(X)


def loda_score(train, X, n_projections: int = 100, seed: int = 0) -> np.ndarray:
    return LODA(n_projections=n_projections).fit(train, seed=seed).score(X)
