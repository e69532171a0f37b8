from __future__ import annotations

import numpy as np

from ..core import as_labels, validate_dataset
from ..corruptions import SplitDataset, round_half_up
from ..errors import ClassTooSmall, NoAnomalies


def stratified_indices(y, train_frac: float = 0.7, seed: int = 0):
    """Per-class shuffled partition; each class keeps >= 1 member on both sides."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    y = as_labels(y)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in (0, 1):
        members = np.flatnonzero(y == c)
        if len(members) < 2:
            raise ClassTooSmall(f"class {c} has {len(members)} member(s); need >= 2 to split")
        members = members[rng.permutation(len(members))]
        n_tr = min(max(round_half_up(len(members) * train_frac), 1), len(members) - 1)
        train.append(members[:n_tr])
        test.append(members[n_tr:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(X, y, train_frac: float = 0.7, seed: int = 0) -> SplitDataset:
    X, y = validate_dataset(X, y)
    tr, te = stratified_indices(y, train_frac, seed)
    return SplitDataset(X[tr], y[tr], X[te], y[te])


def subsample_labels(y_train, gamma_l: float, seed: int = 0) -> np.ndarray:
    """Reveal ``max(1, round(n_anomalies * gamma_l))`` training anomalies at random."""
    if not 0.0 < gamma_l <= 1.0:
        raise ValueError(f"gamma_l must be in (0, 1], got {gamma_l}")
    y = as_labels(y_train)
    anomalies = np.flatnonzero(y == 1)
    if len(anomalies) == 0:
        raise NoAnomalies("no anomalies in the training labels to reveal")
    m = min(len(anomalies), max(1, round_half_up(len(anomalies) * gamma_l)))
    mask = np.zeros(len(y), dtype=bool)
    mask[np.random.default_rng(seed).choice(anomalies, size=m, replace=False)] = True
    return mask
