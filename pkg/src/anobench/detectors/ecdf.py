"""Tail-probability detectors built on per-feature empirical CDFs (ECOD, COPOD)."""

from __future__ import annotations

import numpy as np

from ..errors import TooFewSamples
from .base import BaseDetector


def skew_signs(X: np.ndarray) -> np.ndarray:
    """Sign of the adjusted Fisher-Pearson skewness per column; undefined -> 0."""
    if len(X) < 3:
        return np.zeros(X.shape[1])
    c = X - X.mean(axis=0)
    # the bias adjustment is a positive factor, so the third central moment has the same sign
    m3 = np.mean(c ** 3, axis=0)
    return np.where(np.ptp(X, axis=0) > 0, np.sign(m3), 0.0)


class _TailDetector(BaseDetector):
    defaults: dict = {}

    def _fit(self, X, y, mask, seed):
        if len(X) < 2:
            raise TooFewSamples(f"{self.name} needs at least 2 training rows")
        self.sorted_ = np.sort(X, axis=0)
        self.skew_sign_ = skew_signs(X)

    def tails(self, X):
        """Left and right tail probabilities per sample and feature, in [1/n, 1]."""
        n = len(self.sorted_)
        left = np.empty_like(X)
        right = np.empty_like(X)
        for j in range(X.shape[1]):
            col = self.sorted_[:, j]
            at_or_below = np.searchsorted(col, X[:, j], side="right")
            left[:, j] = at_or_below / n
            right[:, j] = self._right_tail(col, X[:, j], at_or_below, n)
        lo = 1.0 / n
        return np.clip(left, lo, 1.0), np.clip(right, lo, 1.0)

    def _right_tail(self, col, x, at_or_below, n):
        raise NotImplementedError

    def _score(self, X):
        u_left, u_right = self.tails(X)
        nl_left = -np.log(u_left)
        nl_right = -np.log(u_right)
        s = self.skew_sign_
        # negative skew -> left tail, positive -> right tail, zero -> average of both
        nl_auto = np.where(s < 0, nl_left, np.where(s > 0, nl_right, 0.5 * (nl_left + nl_right)))
        return np.maximum.reduce([nl_left.sum(1), nl_right.sum(1), nl_auto.sum(1)])


class ECOD(_TailDetector):
    """Right tail is ``1 - F(x) + 1/n`` with F the right-continuous training ECDF."""

    name = "ecod"

    def _right_tail(self, col, x, at_or_below, n):
        return 1.0 - at_or_below / n + 1.0 / n


class COPOD(_TailDetector):
    """Copula-style right tail: the ECDF of the negated column, ``#{X_j >= x} / n``."""

    name = "copod"

    def _right_tail(self, col, x, at_or_below, n):
        return (n - np.searchsorted(col, x, side="left")) / n


def ecod_score(train, X) -> np.ndarray:
    return ECOD().fit(train).score(X)


def copod_score(train, X) -> np.ndarray:
    return COPOD().fit(train).score(X)
