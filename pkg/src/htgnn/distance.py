"""Cosine distance matrices over bank feature vectors."""

from __future__ import annotations

import numpy as np


def cosine_distance_matrix(features: np.ndarray) -> np.ndarray:
    """D[i][j] = 1 - cos(x_i, x_j), clamped to [0, 2], exact zero diagonal.

    Rows are L2-normalised internally; an all-zero row has no direction
    and raises with the offending bank index.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-d matrix")
    norms = np.linalg.norm(x, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ValueError(f"bank index {int(zero_rows[0])} has a zero feature vector")
    sim = (x @ x.T) / np.outer(norms, norms)
    d = 1.0 - sim
    np.clip(d, 0.0, 2.0, out=d)
    # Mirror the upper triangle so symmetry is exact by construction.
    upper = np.triu(d, k=1)
    return upper + upper.T


def validate_distance_matrix(d: np.ndarray) -> np.ndarray:
    """Check the distance-matrix contract; returns the validated array."""
    m = np.asarray(d, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.all(np.isfinite(m)):
        raise ValueError("distance matrix contains non-finite entries")
    if np.any(m < 0.0):
        raise ValueError("distance matrix contains negative entries")
    if np.any(np.diag(m) != 0.0):
        raise ValueError("distance matrix diagonal must be exactly zero")
    if not np.array_equal(m, m.T):
        raise ValueError("distance matrix must be symmetric")
    return m
