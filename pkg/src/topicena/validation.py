"""Input validation helpers used by the estimator classes and domain operations."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_probability_matrix(X) -> np.ndarray:
    """Validate a 2-D matrix of probabilities; returns a float64 array."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_all_finite=True)
    if X.size and (X.min() < 0.0 or X.max() > 1.0):
        raise ValueError(
            f"probabilities must lie in [0, 1]; found range [{X.min()}, {X.max()}]"
        )
    return X


def check_binary_matrix(X) -> np.ndarray:
    """Validate a 2-D binary matrix; returns a uint8 array."""
    X = check_array(X, dtype=None, ensure_2d=True)
    vals = np.unique(X)
    if not np.isin(vals, (0, 1)).all():
        raise ValueError(f"code matrix must be binary; found values {vals[:10]}")
    return X.astype(np.uint8)


def check_threshold(threshold: float) -> float:
    threshold = float(threshold)
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return threshold


def check_matrix(X) -> np.ndarray:
    """Validate a 2-D finite float matrix."""
    return check_array(X, dtype=np.float64, ensure_2d=True, ensure_all_finite=True)


def check_weight_matrix(X) -> np.ndarray:
    """Validate a units-by-pairs matrix of non-negative adjacency weights."""
    X = check_matrix(X)
    if X.size and X.min() < 0.0:
        raise ValueError("adjacency weights must be non-negative")
    return X


def midranks(values) -> np.ndarray:
    """Fractional (midrank) ranking, 1-based; ties receive the mean of their ranks."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks
