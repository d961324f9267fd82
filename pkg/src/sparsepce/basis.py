"""Orthonormal polynomial bases and truncated multi-index sets."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

QNORM_TOL = 1e-12


def univariate_table(family: str, max_degree: int, u) -> np.ndarray:
    """Evaluate orthonormal polynomials of degree ``0..max_degree`` at ``u``.

    Returns an array of shape ``u.shape + (max_degree + 1,)``. Legendre is
    orthonormal w.r.t. the uniform density on ``[-1, 1]``, Hermite w.r.t.
    the standard Gaussian density (probabilists' convention).
    """
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape + (max_degree + 1,))
    out[..., 0] = 1.0
    if max_degree == 0:
        return out
    family = family.lower()
    if family == "legendre":
        out[..., 1] = math.sqrt(3.0) * u
        for k in range(1, max_degree):
            # orthonormal three-term recurrence, b_k = k / sqrt(4k^2 - 1)
            b_next = (k + 1) / math.sqrt(4.0 * (k + 1) ** 2 - 1.0)
            b_k = k / math.sqrt(4.0 * k * k - 1.0)
            out[..., k + 1] = (u * out[..., k] - b_k * out[..., k - 1]) / b_next
    elif family == "hermite":
        out[..., 1] = u
        for k in range(1, max_degree):
            out[..., k + 1] = (u * out[..., k] - math.sqrt(k) * out[..., k - 1]) / math.sqrt(k + 1)
    else:
        raise ValueError(f"unknown polynomial family {family!r}")
    return out


def univariate_eval(family: str, degree: int, u):
    if degree < 0:
        raise ValueError("degree must be non-negative")
    val = univariate_table(family, degree, u)[..., degree]
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class TruncationSpec:
    """Hyperbolic (q-norm) truncation with optional interaction limit."""

    p: int
    q: float = 1.0
    r: int | None = None

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("p must be >= 0")
        if not 0.0 < self.q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        if self.r is not None and self.r < 1:
            raise ValueError("r must be >= 1 or None")

    def admits(self, alpha) -> bool:
        alpha = np.asarray(alpha)
        nz = alpha[alpha > 0].astype(float)
        if self.r is not None and nz.size > self.r:
            return False
        if nz.size == 0:
            return True
        return float(np.sum(nz**self.q) ** (1.0 / self.q)) <= self.p + QNORM_TOL


class MultiIndexSet:
    """Ordered, duplicate-free set of multi-indices (rows of ``alphas``)."""

    def __init__(self, alphas, spec: TruncationSpec | None = None):
        alphas = np.asarray(alphas, dtype=np.int64)
        if alphas.ndim != 2:
            raise ValueError("alphas must be a 2-d integer array")
        if np.any(alphas < 0):
            raise ValueError("multi-index entries must be non-negative")
        if len({tuple(a) for a in alphas}) != len(alphas):
            raise ValueError("duplicate multi-indices")
        self.alphas = alphas
        self.alphas.setflags(write=False)
        self.spec = spec

    @property
    def d(self) -> int:
        return self.alphas.shape[1]

    def __len__(self) -> int:
        return self.alphas.shape[0]

    def __iter__(self):
        return (tuple(int(v) for v in a) for a in self.alphas)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self.as_set()

    def as_set(self) -> set:
        return set(iter(self))

    def total_degrees(self) -> np.ndarray:
        return self.alphas.sum(axis=1)

    def max_degrees(self) -> np.ndarray:
        return self.alphas.max(axis=0)

    def subset(self, idx) -> "MultiIndexSet":
        return MultiIndexSet(self.alphas[np.asarray(idx, dtype=int)], self.spec)

    def to_json(self) -> str:
        return json.dumps(self.alphas.tolist())

    @classmethod
    def from_json(cls, text: str) -> "MultiIndexSet":
        return cls(np.array(json.loads(text), dtype=np.int64))

    def __repr__(self):
        return f"MultiIndexSet(d={self.d}, P={len(self)}, spec={self.spec})"


def _nonzero_patterns(k: int, p: int, q: float, max_len: int):
    """Ordered tuples of ``k`` positive ints whose q-norm is within ``p``."""
    budget = p**q * (1.0 + 1e-15) + QNORM_TOL
    out = []

    def rec(prefix, used):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        left = k - len(prefix) - 1  # every later entry costs at least 1
        v = 1
        while v <= p and used + v**q + left <= budget:
            rec(prefix + [v], used + v**q)
            v += 1

    rec([], 0.0)
    spec = TruncationSpec(p, q)
    return [t for t in out if spec.admits(t)]


def enumerate_truncation(d: int, spec: TruncationSpec) -> MultiIndexSet:
    """All ``alpha`` in N^d with q-norm <= p and interaction order <= r.

    Ordering is graded lexicographic: by total degree, then by descending
    entries from the first dimension on (``(1,0)`` before ``(0,1)``).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    rows = [np.zeros(d, dtype=np.int64)]
    max_k = min(d, spec.p if spec.p > 0 else 0)
    if spec.r is not None:
        max_k = min(max_k, spec.r)
    for k in range(1, max_k + 1):
        patterns = _nonzero_patterns(k, spec.p, spec.q, d)
        if not patterns:
            break
        pats = np.array(patterns, dtype=np.int64)
        for dims in itertools.combinations(range(d), k):
            block = np.zeros((len(pats), d), dtype=np.int64)
            block[:, dims] = pats
            rows.extend(block)
    alphas = np.array(rows, dtype=np.int64).reshape(-1, d)
    order = np.lexsort(tuple(-alphas[:, j] for j in range(d - 1, -1, -1)) + (alphas.sum(axis=1),))
    return MultiIndexSet(alphas[order], spec)


def _tables(families: Sequence[str], indexset: MultiIndexSet, u: np.ndarray) -> list:
    degs = indexset.max_degrees()
    return [univariate_table(families[k], int(degs[k]), u[:, k]) for k in range(indexset.d)]


def _check(families, indexset, points):
    u = np.atleast_2d(np.asarray(points, dtype=float))
    if u.shape[1] != indexset.d:
        raise ValueError(f"points have dimension {u.shape[1]}, index set has {indexset.d}")
    if len(families) != indexset.d:
        raise ValueError("need one polynomial family per dimension")
    return u


def assemble(families: Sequence[str], indexset: MultiIndexSet, points) -> np.ndarray:
    """Regression matrix ``Psi[i, j] = psi_{alpha_j}(u_i)`` on standardized points."""
    u = _check(families, indexset, points)
    psi = np.ones((u.shape[0], len(indexset)))
    alphas = indexset.alphas
    for k, table in enumerate(_tables(families, indexset, u)):
        cols = np.nonzero(alphas[:, k])[0]
        if cols.size:
            psi[:, cols] *= table[:, alphas[cols, k]]
    return psi


def tight_bound(families: Sequence[str], indexset: MultiIndexSet, points) -> np.ndarray:
    """Pointwise ``B(u) = max_alpha |psi_alpha(u)|`` for each row of ``points``."""
    u = _check(families, indexset, points)
    out = np.empty(u.shape[0])
    chunk = max(1, 2_000_000 // max(len(indexset), 1))
    for s in range(0, u.shape[0], chunk):
        out[s:s + chunk] = np.abs(assemble(families, indexset, u[s:s + chunk])).max(axis=1)
    return out


def empirical_coherence(families, indexset, points) -> float:
    """Largest squared basis magnitude over the given points."""
    return float(np.max(tight_bound(families, indexset, points)) ** 2)


def christoffel_coherence(families, indexset, points) -> float:
    """Max over points of the root-mean-square basis magnitude (diagnostic only)."""
    psi = assemble(families, indexset, points)
    return float(np.sqrt(np.max(np.mean(psi**2, axis=1))))
