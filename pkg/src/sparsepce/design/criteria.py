"""Scalar quality measures of a regression matrix."""

from __future__ import annotations

import numpy as np


def d_value(psi) -> float:
    """``det(Psi^T Psi / N)^(1/P)``; zero when ``N < P`` or singular."""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    N, P = psi.shape
    if N < P:
        return 0.0
    sign, logdet = np.linalg.slogdet(psi.T @ psi / N)
    if sign <= 0:
        return 0.0
    return float(np.exp(logdet / P))


def s_value(psi) -> float:
    """``(sqrt(det(Psi^T Psi)) / prod ||Psi_i||)^(1/P)`` in [0, 1]; zero when ``N < P``."""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    N, P = psi.shape
    if N < P:
        return 0.0
    norms = np.linalg.norm(psi, axis=0)
    if np.any(norms == 0):
        return 0.0
    sign, logdet = np.linalg.slogdet(psi.T @ psi)
    if sign <= 0:
        return 0.0
    return float(np.exp((0.5 * logdet - np.log(norms).sum()) / P))


def normalized_gram(psi) -> np.ndarray:
    """Gram matrix of unit-norm columns; zero-norm columns give zero rows/cols."""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    norms = np.linalg.norm(psi, axis=0)
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    g = psi.T @ psi
    return g * inv[:, None] * inv[None, :]


def mutual_coherence(psi) -> float:
    g = normalized_gram(psi)
    P = g.shape[0]
    if P < 2:
        return 0.0
    np.fill_diagonal(g, 0.0)
    return float(np.max(np.abs(g)))


def avg_cross_correlation(psi) -> float:
    g = normalized_gram(psi)
    P = g.shape[0]
    if P < 2:
        return 0.0
    np.fill_diagonal(g, 0.0)
    return float(np.sum(g**2) / (P * (P - 1)))
