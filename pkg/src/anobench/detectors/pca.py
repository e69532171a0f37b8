from __future__ import annotations

import numpy as np

from ..errors import DegenerateData, TooFewSamples
from .base import BaseDetector


class PCA(BaseDetector):
    """Squared reconstruction error after projecting onto the leading axes.

    Keeps the fewest leading principal components whose cumulative share of the
    training variance reaches ``variance_kept``.
    """

    name = "pca"
    defaults = {"variance_kept": 0.9}

    def _check_params(self, p):
        if not 0.0 < p["variance_kept"] <= 1.0:
            raise ValueError(f"pca: variance_kept must be in (0, 1], got {p['variance_kept']}")

    def _fit(self, X, y, mask, seed):
        if len(X) < 2:
            raise TooFewSamples("pca needs at least 2 training rows")
        self.mean_ = X.mean(axis=0)
        cov = np.cov(X - self.mean_, rowvar=False).reshape(X.shape[1], X.shape[1])
        evals, evecs = np.linalg.eigh(cov)
        order = np.argsort(evals)[::-1]
        evals = np.clip(evals[order], 0.0, None)
        evecs = evecs[:, order]
        total = evals.sum()
        if total <= 0.0:
            raise DegenerateData("pca: training data has zero total variance")
        frac = np.cumsum(evals) / total
        # tolerance so that variance_kept=1 keeps every non-null axis
        n_keep = int(np.searchsorted(frac, self.params["variance_kept"] - 1e-12) + 1)
        n_keep = min(n_keep, len(evals))
        self.components_ = evecs[:, :n_keep]
        self.explained_variance_ = evals

    def _score(self, X):
        Z = X - self.mean_
        recon = (Z @ self.components_) @ self.components_.T
        return ((Z - recon) ** 2).sum(axis=1)


def pca_fit_score(train, X, variance_kept: float = 0.9) -> np.ndarray:
    return PCA(variance_kept=variance_kept).fit(train).score(X)
