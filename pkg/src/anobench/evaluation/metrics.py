from __future__ import annotations

import time

import numpy as np
from scipy.stats import rankdata

from ..core import as_labels
from ..errors import LengthMismatch, NoPositives, NonFiniteValue, SingleClassEval


def _check(scores, y):
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = as_labels(y)
    if s.shape != y.shape:
        raise LengthMismatch(f"{len(s)} scores for {len(y)} labels")
    if not np.all(np.isfinite(s)):
        raise NonFiniteValue("scores must be finite")
    return s, y


def aucroc(scores, y) -> float:
    """Probability that a random anomaly outscores a random normal; ties count 1/2."""
    s, y = _check(scores, y)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassEval("AUCROC needs at least one anomaly and one normal sample")
    ranks = rankdata(s)  # midranks
    auc = (ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)
    return float(min(1.0, max(0.0, auc)))


def aucpr(scores, y) -> float:
    """Average precision with each group of tied scores treated as one threshold."""
    s, y = _check(scores, y)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise NoPositives("AUCPR needs at least one anomaly")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    tp = np.cumsum(y[order])
    # last index of every tie group
    ends = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tp_at = tp[ends]
    precision = tp_at / (ends + 1)
    gained = np.diff(np.r_[0, tp_at])
    # divide once at the end; clamp absorbs summation rounding
    return float(min(1.0, (gained * precision).sum() / n_pos))


def measure_timing(fit_fn, score_fn):
    """Run ``fit_fn()`` then ``score_fn()``; return ``(scores, fit_ms, score_ms)``."""
    t0 = time.perf_counter()
    fit_fn()
    t1 = time.perf_counter()
    result = score_fn()
    t2 = time.perf_counter()
    return result, (t1 - t0) * 1e3, (t2 - t1) * 1e3
