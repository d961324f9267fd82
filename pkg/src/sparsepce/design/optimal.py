"""Subset selection from a candidate set: RRQR D-optimal and near-optimal greedy."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..basis import MultiIndexSet, assemble
from ..inputs import InputModel
from .core import Design

log = logging.getLogger(__name__)

GREEDY_OPS_WARN = 1e9


def _weighted(candidates: Design, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.shape[0] != candidates.n:
        raise ValueError("candidate matrix must have one row per candidate point")
    return psi if not candidates.weighted else candidates.weights[:, None] * psi


def _exchange(V: np.ndarray, sel: np.ndarray, max_swaps: int) -> tuple[np.ndarray, int]:
    """Row exchanges that increase ``|det V[sel]|`` for square ``V[sel]``.

    Swapping selected row ``i`` for candidate ``j`` scales the determinant
    by ``(V[j] V[sel]^{-1})_i``; take the largest factor while it exceeds 1.
    """
    sel = sel.copy()
    swaps = 0
    outside = np.setdiff1d(np.arange(V.shape[0]), sel)
    while swaps < max_swaps and outside.size:
        try:
            factors = sla.solve(V[sel].T, V[outside].T).T  # rows: V[j] V_S^{-1}
        except (np.linalg.LinAlgError, ValueError):
            break
        a = np.abs(factors)
        j, i = np.unravel_index(np.argmax(a), a.shape)
        if a[j, i] <= 1.0 + 1e-10:
            break
        sel[i], outside[j] = outside[j], sel[i]
        swaps += 1
    return sel, swaps


def d_optimal_indices(matrix, n: int, refine: bool = False) -> np.ndarray:
    """Rows chosen by SVD of ``matrix^T`` then pivoted QR of the leading right singular vectors.

    For ``n <= rank`` the pivots of the ``n`` leading singular vectors give
    the whole selection. Rows beyond the numerical rank are added one at a
    time, each maximizing ``det(Psi^T Psi)`` (largest leverage).
    """
    A = np.asarray(matrix, dtype=float)
    M, P = A.shape
    if n > M:
        raise ValueError(f"cannot select {n} rows from {M} candidates")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == M:
        return np.arange(M)
    # right singular vectors of A^T are the left singular vectors of A
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(M, P) * np.finfo(float).eps)) if s.size and s[0] > 0 else 0
    r = min(n, rank)
    if r == 0:
        return np.arange(n)
    V = U[:, :r]
    _, _, piv = sla.qr(V.T, mode="economic", pivoting=True)
    sel = np.array(piv[:r])
    if refine:
        sel, _ = _exchange(V, sel, 2 * P)
    if n > r:
        sel = _augment(A, list(sel), n)
    return np.sort(sel)


def _augment(A, sel, n):
    # det(G + x x^T) = det(G) (1 + x^T G^{-1} x)
    chosen = np.zeros(A.shape[0], dtype=bool)
    chosen[sel] = True
    while len(sel) < n:
        G = A[sel].T @ A[sel]
        lev = np.einsum("ij,ij->i", A @ np.linalg.pinv(G, hermitian=True), A)
        lev[chosen] = -np.inf
        j = int(np.argmax(lev))
        sel.append(j)
        chosen[j] = True
    return np.array(sel)


def _pair_scores(G, rows):
    """(mu, gamma) of ``[Psi_opt; row]`` for every candidate row, given ``G = Psi_opt^T Psi_opt``."""
    m, P = rows.shape
    Gj = G[None, :, :] + rows[:, :, None] * rows[:, None, :]
    diag = np.einsum("kii->ki", Gj)
    inv = np.divide(1.0, np.sqrt(diag), out=np.zeros_like(diag), where=diag > 0)
    C = Gj * inv[:, :, None] * inv[:, None, :]
    idx = np.arange(P)
    C[:, idx, idx] = 0.0
    mu = np.abs(C).reshape(m, -1).max(axis=1)
    gam = (C**2).reshape(m, -1).sum(axis=1) / (P * (P - 1))
    return mu, gam


def near_optimal_indices(matrix, n: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy rows minimizing normalized distance of (mutual coherence, avg cross-correlation) to the utopia point."""
    A = np.asarray(matrix, dtype=float)
    M, P = A.shape
    if n > M:
        raise ValueError(f"cannot select {n} rows from {M} candidates")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == M:
        return np.arange(M)
    if float(n) * M * P * P > GREEDY_OPS_WARN:
        log.warning("near-optimal sampling: about %.1e operations (n=%d, M=%d, P=%d)", float(n) * M * P * P, n, M, P)
    sel = [int(rng.integers(M))]
    available = np.ones(M, dtype=bool)
    available[sel[0]] = False
    G = np.outer(A[sel[0]], A[sel[0]])
    chunk = max(1, int(2e7 // max(P * P, 1)))
    mu = np.empty(M)
    gam = np.empty(M)
    while len(sel) < n:
        if P < 2:
            mu[:] = gam[:] = 0.0
        else:
            for s in range(0, M, chunk):
                mu[s:s + chunk], gam[s:s + chunk] = _pair_scores(G, A[s:s + chunk])
        cand = np.flatnonzero(available)
        score = np.zeros(cand.size)
        for v in (mu[cand], gam[cand]):
            lo, hi = v.min(), v.max()
            if hi > lo:
                score += ((v - lo) / (hi - lo)) ** 2
        j = int(cand[np.argmin(score)])  # first minimum: lowest index wins ties
        sel.append(j)
        available[j] = False
        G += np.outer(A[j], A[j])
    return np.array(sel)


def d_optimal_rrqr(candidates: Design, psi, n: int, refine: bool = False) -> Design:
    idx = d_optimal_indices(_weighted(candidates, psi), n, refine)
    return candidates.take(idx, sampler="d_optimal", n=n, indices=idx.tolist(), refine=refine)


def near_optimal_greedy(candidates: Design, psi, n: int, rng: np.random.Generator) -> Design:
    idx = near_optimal_indices(_weighted(candidates, psi), n, rng)
    return candidates.take(idx, sampler="near_optimal", n=n, indices=idx.tolist())


@dataclass
class CandidatePool:
    """``2M`` candidate points from which size-``M`` candidate sets are drawn."""

    pool: Design
    m: int

    def __post_init__(self):
        if self.pool.n < self.m:
            raise ValueError("pool smaller than the draw size")

    def draw_m(self, rng: np.random.Generator) -> tuple[Design, np.ndarray]:
        """Size-``M`` subset without replacement, in pool order, and its pool indices."""
        idx = np.sort(rng.choice(self.pool.n, size=self.m, replace=False))
        return self.pool.take(idx, draw=self.m), idx


def build_candidate_pool(
    sampler,
    input_model: InputModel,
    indexset: MultiIndexSet,
    rng: np.random.Generator,
    m: int | None = None,
) -> CandidatePool:
    """Pool of ``2M`` points (``M = 10 P`` by default) from a base sampler.

    ``sampler`` is a name accepted by :func:`sparsepce.design.make_design`
    or a callable ``(input_model, indexset, n, rng) -> Design``.
    """
    from . import make_design

    m = 10 * len(indexset) if m is None else int(m)
    if m < 1:
        raise ValueError("draw size must be positive")
    if callable(sampler):
        pool = sampler(input_model, indexset, 2 * m, rng)
    else:
        pool = make_design(sampler, input_model, indexset, 2 * m, rng)
    return CandidatePool(pool, m)


def pool_matrix(pool: Design, indexset: MultiIndexSet, families) -> np.ndarray:
    return assemble(families, indexset, pool.points_standard)
