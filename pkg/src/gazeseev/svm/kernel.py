"""Gaussian (RBF) kernel."""

from __future__ import annotations

import math

import numpy as np


def rbf_kernel(u, v, gamma: float) -> float:
    """``exp(-gamma * ||u - v||^2)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    d = u - v
    return math.exp(-gamma * float(np.dot(d, d)))


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Explicit differences instead of the |a|^2 + |b|^2 - 2ab expansion: keeps the
    # diagonal exactly zero and the matrix exactly symmetric.
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    out = np.zeros((a.shape[0], b.shape[0]))
    for d in range(a.shape[1]):
        diff = a[:, d, None] - b[None, :, d]
        out += diff * diff
    return out


def kernel_matrix(a, b, gamma: float) -> np.ndarray:
    return np.exp(-gamma * squared_distances(a, b))
