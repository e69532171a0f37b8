"""Uniform fit/score contract shared by every detector."""

from __future__ import annotations

import numpy as np

from ..core import as_labels, as_matrix, validate_mask
from ..errors import DimMismatch, SingleClassTraining, UnknownParameter


class BaseDetector:
    """Fit on a training matrix, then score any matrix with the same width.

    Subclasses declare ``name``, ``defaults`` (the full parameter set) and
    ``label_informed``. Parameters outside ``defaults`` are rejected at
    construction; ``_check_params`` enforces per-parameter domains. Scores are
    always "higher = more anomalous".
    """

    name: str = ""
    defaults: dict = {}
    label_informed = False

    def __init__(self, **params):
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise UnknownParameter(f"{self.name}: unknown parameter(s) {unknown}")
        self.params = {**self.defaults, **params}
        self._check_params(self.params)
        self.n_features_ = None

    def _check_params(self, p: dict) -> None:
        pass

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"

    @property
    def is_fitted(self) -> bool:
        return self.n_features_ is not None

    def fit(self, X, y=None, mask=None, seed: int = 0):
        X = as_matrix(X, "train")
        if self.label_informed:
            target = training_target(y, mask, len(X))
            self._fit(X, target, mask, seed)
        else:
            self._fit(X, None, None, seed)
        self.n_features_ = X.shape[1]
        return self

    def score(self, X) -> np.ndarray:
        if not self.is_fitted:
            raise RuntimeError(f"{self.name} must be fitted before scoring")
        X = as_matrix(X)
        if X.shape[1] != self.n_features_:
            raise DimMismatch(
                f"{self.name} was fitted on {self.n_features_} features, got {X.shape[1]}"
            )
        s = np.asarray(self._score(X), dtype=np.float64)
        assert s.shape == (X.shape[0],) and np.all(np.isfinite(s)), self.name
        return s

    def fit_score(self, train, X, y=None, mask=None, seed: int = 0) -> np.ndarray:
        return self.fit(train, y, mask, seed).score(X)

    def _fit(self, X, y, mask, seed):
        raise NotImplementedError

    def _score(self, X):
        raise NotImplementedError


def training_target(y, mask, n: int) -> np.ndarray:
    """Labels a label-informed detector trains on.

    With a mask, only revealed anomalies count as positives and every other
    sample (unlabeled) is treated as normal.
    """
    if mask is not None:
        if y is not None:
            mask = validate_mask(mask, y)
        target = np.asarray(mask, dtype=np.int64)
    elif y is not None:
        target = as_labels(y)
    else:
        raise SingleClassTraining("label-informed detector needs labels or a label mask")
    if len(target) != n:
        raise DimMismatch(f"got {len(target)} labels for {n} training rows")
    if target.min() == target.max():
        raise SingleClassTraining("training labels contain a single class")
    return target
