from __future__ import annotations

import numpy as np

from ..core import derive_seed
from .base import BaseDetector
from .supervised import RandomForest

DEFAULT_ROSTER = ("knn", "lof", "hbos", "ecod", "iforest", "pca")


class ScoreStack(BaseDetector):
    """Random forest on raw features augmented with unsupervised detector scores.

    Every roster detector is fitted on the training features alone; its scores
    on the training rows and on the scored rows become extra columns. The
    forest then learns from revealed anomalies, with unlabeled rows as normals.
    ``roster`` holds detector names or ``(name, params)`` pairs.
    """

    name = "scorestack"
    label_informed = True
    defaults = {"roster": DEFAULT_ROSTER, "n_trees": 100}

    def _check_params(self, p):
        from .registry import make_detector

        self._roster = []
        for entry in p["roster"]:
            name, params = (entry, {}) if isinstance(entry, str) else entry
            det = make_detector(name, **dict(params))
            if det.label_informed:
                raise ValueError(f"scorestack: roster detector {name!r} must be unsupervised")
            self._roster.append(det)
        RandomForest(n_trees=p["n_trees"])

    def _fit(self, X, y, mask, seed):
        for i, det in enumerate(self._roster):
            det.fit(X, seed=derive_seed(seed, [i + 1]))
        self.forest_ = RandomForest(n_trees=self.params["n_trees"])
        self.forest_.fit(self._augment(X), y, seed=seed)

    def _augment(self, X):
        if not self._roster:
            return X
        return np.column_stack([X] + [det.score(X) for det in self._roster])

    def _score(self, X):
        return self.forest_.score(self._augment(X))


def scorestack_fit_predict(train, y_train, mask, X, roster=DEFAULT_ROSTER, n_trees: int = 100,
                           seed: int = 0) -> np.ndarray:
    return ScoreStack(roster=roster, n_trees=n_trees).fit(train, y_train, mask, seed=seed).score(X)
