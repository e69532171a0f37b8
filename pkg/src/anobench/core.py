"""Shared data model: validation of feature/label arrays and seed derivation.

Feature matrices are plain ``float64`` numpy arrays of shape ``(n, d)``, labels
are ``int64`` arrays of 0 (normal) / 1 (anomaly), and label masks are boolean
arrays marking which anomalies are revealed to a semi-supervised learner.
Validated arrays are returned read-only so they can be shared between workers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import LabelDomain, LengthMismatch, NonFiniteValue

_MASK64 = (1 << 64) - 1


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite 2-d float64 array with at least one row and column."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise LengthMismatch(f"{name} must be a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValue(f"{name} has a non-finite value at row {bad[0]}, column {bad[1]}")
    return arr


def as_labels(y, name: str = "y") -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
        raise LabelDomain(f"{name} contains non-finite labels")
    bad = ~np.isin(arr, (0, 1))
    if np.any(bad):
        raise LabelDomain(f"{name} has label {arr[bad][0]!r} outside {{0, 1}}")
    return arr.astype(np.int64)


def validate_dataset(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Check a feature matrix and its labels, returning read-only copies.

    Raises
    ------
    NonFiniteValue
        ``X`` contains NaN or infinity.
    LabelDomain
        A label is not 0 or 1.
    LengthMismatch
        ``len(y) != X.shape[0]`` or ``X`` is not a non-empty matrix.
    """
    Xa = as_matrix(X)
    ya = as_labels(y)
    if Xa.shape[0] != ya.shape[0]:
        raise LengthMismatch(f"X has {Xa.shape[0]} rows but y has {ya.shape[0]} labels")
    Xa = np.array(Xa, copy=True)
    ya = np.array(ya, copy=True)
    Xa.setflags(write=False)
    ya.setflags(write=False)
    return Xa, ya


def validate_mask(mask, y) -> np.ndarray:
    """A label mask may only reveal anomalies."""
    m = np.asarray(mask, dtype=bool)
    y = as_labels(y)
    if m.shape != y.shape:
        raise LengthMismatch(f"mask length {m.shape[0]} != label length {y.shape[0]}")
    if np.any(m & (y != 1)):
        raise LabelDomain("mask reveals a sample whose label is not 1")
    return m


def anomaly_ratio(y) -> float:
    y = np.asarray(y)
    return float(y.sum()) / len(y) if len(y) else 0.0


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, path: Sequence[int] = ()) -> int:
    """Derive a child 64-bit seed from ``master`` and a grid coordinate path.

    Pure and stateless: ``derive_seed(s, [])`` is ``s``; each path element is
    folded in with a position-dependent splitmix64 round, so ``[1, 2]`` and
    ``[2, 1]`` give different seeds.
    """
    h = int(master) & _MASK64
    for depth, idx in enumerate(path):
        idx = int(idx)
        if idx < 0:
            raise ValueError(f"seed path indices must be non-negative, got {idx}")
        h = _splitmix64(h ^ _splitmix64((idx << 8) ^ (depth + 1)))
    return h


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _MASK64)
