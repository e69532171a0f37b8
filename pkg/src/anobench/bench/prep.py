from __future__ import annotations

import numpy as np

from ..core import anomaly_ratio, validate_dataset
from ..corruptions import round_half_up
from ..errors import AnomalyRatioTooHigh

MAX_ANOMALY_RATIO = 0.40
MIN_ROWS = 1_000
MAX_ROWS = 10_000


def prep_dataset(X, y, seed: int = 0, min_rows: int = MIN_ROWS, max_rows: int = MAX_ROWS):
    """Size-normalise a dataset while keeping its anomaly ratio.

    Datasets with an anomaly ratio of 40% or more are rejected. Smaller than
    ``min_rows``: every original row is kept and each class is topped up by
    sampling with replacement until the total is exactly ``min_rows``. Larger
    than ``max_rows``: a stratified subsample without replacement of exactly
    ``max_rows``. Anything in between is returned unchanged.
    """
    X, y = validate_dataset(X, y)
    ratio = anomaly_ratio(y)
    if ratio >= MAX_ANOMALY_RATIO:
        raise AnomalyRatioTooHigh(f"anomaly ratio {ratio:.3f} is not below {MAX_ANOMALY_RATIO}")
    n = len(y)
    if min_rows <= n <= max_rows:
        return X, y
    target = min_rows if n < min_rows else max_rows
    n_anom = round_half_up(target * ratio)
    if ratio > 0:
        n_anom = max(1, n_anom)
    want = {0: target - n_anom, 1: n_anom}
    rng = np.random.default_rng(seed)
    rows = []
    for c in (0, 1):
        members = np.flatnonzero(y == c)
        if n < min_rows:
            extra = rng.choice(members, size=want[c] - len(members), replace=True) if want[c] > len(members) else []
            rows.append(np.concatenate([members, np.asarray(extra, dtype=np.int64)]))
        else:
            rows.append(rng.choice(members, size=want[c], replace=False))
    rows = np.concatenate(rows)
    rows = rows[rng.permutation(len(rows))]
    return validate_dataset(X[rows], y[rows])
