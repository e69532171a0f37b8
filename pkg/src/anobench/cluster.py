"""Seeded k-means (k-means++ start, Lloyd iterations) used by CBLOF and GMM init."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KTooLarge


@dataclass(frozen=True)
class KMeansResult:
    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int


def sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centers = [X[rng.integers(n)]]
    closest = sq_dists(X, centers[0][None, :])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            i = rng.integers(n)
        else:
            i = rng.choice(n, p=closest / total)
        centers.append(X[i])
        closest = np.minimum(closest, sq_dists(X, X[i][None, :])[:, 0])
    return np.array(centers)


def _lloyd(X, centers, max_iter, tol):
    prev = np.inf
    for it in range(1, max_iter + 1):
        d = sq_dists(X, centers)
        labels = d.argmin(1)
        point_cost = d[np.arange(len(X)), labels]
        inertia = point_cost.sum()
        centers = centers.copy()
        counts = np.bincount(labels, minlength=len(centers))
        for j in np.flatnonzero(counts == 0):
            # reseed an empty cluster at the worst-served point
            far = int(point_cost.argmax())
            centers[j] = X[far]
            labels[far] = j
            point_cost[far] = 0.0
        for j in range(len(centers)):
            members = labels == j
            if members.any():
                centers[j] = X[members].mean(0)
        if np.isfinite(prev) and prev - inertia <= tol * max(prev, 1e-300):
            break
        prev = inertia
    d = sq_dists(X, centers)
    labels = d.argmin(1)
    return centers, labels, float(d[np.arange(len(X)), labels].sum()), it


def kmeans(X, k: int, seed: int = 0, n_init: int = 10, max_iter: int = 300,
           tol: float = 1e-6) -> KMeansResult:
    """Best-of-``n_init`` k-means by inertia; deterministic for a given seed."""
    X = np.asarray(X, dtype=np.float64)
    if k < 1 or k > len(X):
        raise KTooLarge(f"k-means with {k} clusters on {len(X)} rows")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        res = _lloyd(X, kmeans_pp(X, k, rng), max_iter, tol)
        if best is None or res[2] < best[2]:
            best = res
    return KMeansResult(*best)
