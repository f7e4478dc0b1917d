"""Shared generators and metrics for the test suite."""

from __future__ import annotations

import numpy as np

from quadwitness import SymmetricForm


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> SymmetricForm:
    G = rng.standard_normal((n, n)) * scale
    return SymmetricForm(0.5 * (G + G.T))


def random_traceless(rng: np.random.Generator, n: int) -> SymmetricForm:
    M = random_symmetric(rng, n).entries.copy()
    M -= (np.trace(M) / n) * np.eye(n)
    return SymmetricForm(M)


def random_skew(rng: np.random.Generator, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n))
    return G - G.T


def parallelism_angle(X, Y) -> float:
    """Unsigned angle between two matrices seen as vectors, stable near 0.

    Computed from the projection residual, so exactly parallel inputs give
    exactly zero instead of the arccos rounding plateau.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    ny2 = float(np.tensordot(Y, Y))
    if ny2 == 0.0:
        raise ValueError("reference matrix is zero")
    alpha = float(np.tensordot(X, Y)) / ny2
    resid = np.linalg.norm(X - alpha * Y)
    return float(np.arctan2(resid, abs(alpha) * np.sqrt(ny2)))


def sphere_samples(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    X = rng.standard_normal((count, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)
