"""Noise and corruption transforms applied to an already split dataset."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import validate_dataset
from .errors import DimMismatch, FactorOutOfRange, RatioOutOfRange

MAX_DUPLICATION = 6
MAX_NOISE_RATIO = 0.5
MAX_FLIP_RATIO = 0.5


@dataclass(frozen=True)
class SplitDataset:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray

    def __post_init__(self):
        Xtr, ytr = validate_dataset(self.X_train, self.y_train)
        Xte, yte = validate_dataset(self.X_test, self.y_test)
        if Xtr.shape[1] != Xte.shape[1]:
            raise DimMismatch(f"train has {Xtr.shape[1]} columns, test has {Xte.shape[1]}")
        for name, value in zip(("X_train", "y_train", "X_test", "y_test"), (Xtr, ytr, Xte, yte)):
            object.__setattr__(self, name, value)

    @property
    def n_features(self) -> int:
        return self.X_train.shape[1]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _duplicate(X, y, factor, rng):
    anomalies = np.flatnonzero(y == 1)
    extra = np.tile(anomalies, factor - 1)
    rows = np.concatenate([np.arange(len(y)), extra])
    rows = rows[rng.permutation(len(rows))]
    return X[rows], y[rows]


def duplicate_anomalies(split: SplitDataset, factor: int, seed: int = 0) -> SplitDataset:
    """Repeat every anomaly row ``factor`` times in both train and test, then shuffle."""
    if int(factor) != factor or not 1 <= factor <= MAX_DUPLICATION:
        raise FactorOutOfRange(f"duplication factor must be an integer in [1, {MAX_DUPLICATION}], got {factor}")
    factor = int(factor)
    rng = np.random.default_rng(seed)
    Xtr, ytr = _duplicate(split.X_train, split.y_train, factor, rng)
    Xte, yte = _duplicate(split.X_test, split.y_test, factor, rng)
    return SplitDataset(Xtr, ytr, Xte, yte)


def add_irrelevant_features(split: SplitDataset, noise_ratio: float, seed: int = 0) -> SplitDataset:
    """Append ``round(d * noise_ratio)`` uniform-noise columns.

    Each new column copies the training ``[min, max]`` of a randomly chosen
    original feature and is filled i.i.d. uniform in both train and test.
    """
    if not 0.0 <= noise_ratio <= MAX_NOISE_RATIO:
        raise RatioOutOfRange(f"noise ratio must be in [0, {MAX_NOISE_RATIO}], got {noise_ratio}")
    d = split.n_features
    n_new = round_half_up(d * noise_ratio)
    if n_new == 0:
        return split
    rng = np.random.default_rng(seed)
    sources = rng.integers(0, d, size=n_new)
    lo = split.X_train.min(0)[sources]
    hi = split.X_train.max(0)[sources]

    def noise(n):
        return np.clip(lo + (hi - lo) * rng.random((n, n_new)), lo, hi)

    return SplitDataset(
        np.hstack([split.X_train, noise(len(split.X_train))]), split.y_train,
        np.hstack([split.X_test, noise(len(split.X_test))]), split.y_test,
    )


def flip_indices(n_train: int, error_ratio: float, seed: int = 0) -> np.ndarray:
    if not 0.0 <= error_ratio <= MAX_FLIP_RATIO:
        raise RatioOutOfRange(f"label error ratio must be in [0, {MAX_FLIP_RATIO}], got {error_ratio}")
    m = round_half_up(n_train * error_ratio)
    return np.sort(np.random.default_rng(seed).choice(n_train, size=m, replace=False))


def flip_labels(split: SplitDataset, error_ratio: float, seed: int = 0) -> SplitDataset:
    """Flip ``round(n_train * error_ratio)`` training labels; test labels stay clean."""
    idx = flip_indices(len(split.y_train), error_ratio, seed)
    y = np.array(split.y_train, copy=True)
    y[idx] = 1 - y[idx]
    return SplitDataset(split.X_train, y, split.X_test, split.y_test)
