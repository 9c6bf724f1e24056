"""Input validation helpers.

Arrays, not wrapper classes, are the currency of this package:

* an *image* is a 2-D float64 array of finite, non-negative intensities;
* a *membership field* is an (H, W, c) float64 array whose per-pixel
  rows lie in [0, 1] and sum to 1 within ``ROW_SUM_TOL``;
* *cluster centers* are a 1-D float64 array of c >= 2 finite values;
* a *label map* is a 2-D integer array with values in [0, c).

Every public entry point funnels through these checkers so that the
invariants hold at module boundaries.
"""

from __future__ import annotations

import numpy as np

ROW_SUM_TOL = 1e-9


def check_image(arr, name: str = "image") -> np.ndarray:
    """Validate and return a 2-D float64 intensity grid."""
    out = np.asarray(arr, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"{name} must have width and height >= 1, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(out < 0):
        raise ValueError(f"{name} contains negative intensities")
    return out


def check_membership(u, n_clusters: int | None = None, name: str = "membership") -> np.ndarray:
    """Validate an (H, W, c) membership field: values in [0, 1], rows sum to 1."""
    out = np.asarray(u, dtype=np.float64)
    if out.ndim != 3:
        raise ValueError(f"{name} must have shape (H, W, c), got {out.shape}")
    if n_clusters is not None and out.shape[2] != n_clusters:
        raise ValueError(f"{name} has {out.shape[2]} clusters, expected {n_clusters}")
    if out.shape[2] < 2:
        raise ValueError(f"{name} needs at least 2 clusters, got {out.shape[2]}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(out < 0) or np.any(out > 1):
        raise ValueError(f"{name} values must lie in [0, 1]")
    row_sums = out.sum(axis=2)
    worst = np.abs(row_sums - 1.0).max()
    if worst > ROW_SUM_TOL:
        raise ValueError(f"{name} rows must sum to 1 (worst deviation {worst:.3e})")
    return out


def check_centers(centers, name: str = "centers") -> np.ndarray:
    """Validate a 1-D array of at least two finite cluster centers."""
    out = np.asarray(centers, dtype=np.float64)
    if out.ndim != 1 or out.size < 2:
        raise ValueError(f"{name} must be a 1-D array of >= 2 values, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite values")
    return out


def check_label_map(labels, n_clusters: int, name: str = "labels") -> np.ndarray:
    """Validate a 2-D integer label map with values in [0, n_clusters)."""
    out = np.asarray(labels)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.issubdtype(out.dtype, np.integer):
        raise ValueError(f"{name} must be integer-valued, got dtype {out.dtype}")
    if out.size and (out.min() < 0 or out.max() >= n_clusters):
        raise ValueError(f"{name} values must lie in [0, {n_clusters})")
    return out


def check_binary_map(labels, name: str = "labels") -> np.ndarray:
    """Validate a 2-D map containing only 0s and 1s; returns uint8."""
    out = np.asarray(labels)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.isin(out, (0, 1)).all():
        raise ValueError(f"{name} must be binary (0/1)")
    return out.astype(np.uint8)


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "inputs") -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what} have mismatched shapes {a.shape} and {b.shape}")
