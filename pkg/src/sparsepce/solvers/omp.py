"""Orthogonal matching pursuit with LOO-based model selection."""

from __future__ import annotations

import math

import numpy as np

from ..selection import DegenerateLeverageError, correction_factor, loo_from_factors
from .base import IncrementalQR, RegressionProblem, SparseSolution, column_norms


def path_loo(qr: IncrementalQR, b: np.ndarray, fitted: np.ndarray) -> tuple[float, float]:
    """(LOO, modified LOO) for the current OLS fit held in ``qr``."""
    N, k = qr.Q.shape[0], qr.k
    if k >= N:
        return np.inf, np.inf
    try:
        loo = loo_from_factors(qr.Q[:, :k], b, fitted)
    except DegenerateLeverageError:
        return np.inf, np.inf
    return loo, loo * correction_factor(N, k, qr.trace_inv_gram())


def early_stop_window(N: int, P: int) -> int:
    return max(1, math.ceil(0.1 * min(N, P)))


def omp(
    problem: RegressionProblem,
    n_terms: int | None = None,
    max_terms: int | None = None,
    early_stop: bool = True,
) -> SparseSolution:
    """Greedy forward selection by residual correlation, OLS coefficients.

    With ``n_terms`` the path runs exactly that many steps and the last model
    is returned. Otherwise the path runs up to ``max_terms`` (default
    ``min(P, N - 1)``) and the model with the smallest modified LOO error is
    returned. The path stops early once the plain LOO error has not
    improved for ``ceil(0.1 * min(N, P))`` consecutive steps.
    """
    A, b = problem.A, problem.b
    N, P = A.shape
    limit = min(P, N - 1) if max_terms is None else min(max_terms, N, P)
    if n_terms is not None:
        if not 1 <= n_terms <= min(N, P):
            raise ValueError(f"n_terms must lie in [1, {min(N, P)}]")
        limit, early_stop = n_terms, False
    norms = column_norms(A)
    An = A / norms
    qr = IncrementalQR(N, limit)
    available = np.ones(P, dtype=bool)
    active: list[int] = []
    resid = b.copy()
    path = []
    best, best_err, best_loo, stall = None, np.inf, np.inf, 0
    window = early_stop_window(N, P)
    while len(active) < limit and available.any():
        corr = np.abs(An.T @ resid)
        corr[~available] = -1.0
        j = int(np.argmax(corr))
        available[j] = False
        if not qr.add(A[:, j]):
            continue  # numerically dependent on the active set
        active.append(j)
        coef = qr.solve(b)
        fitted = qr.Q[:, : qr.k] @ (qr.Q[:, : qr.k].T @ b)
        resid = b - fitted
        loo, mloo = path_loo(qr, b, fitted)
        path.append({"active": list(active), "coef": coef.copy(), "loo": loo, "mloo": mloo})
        if mloo < best_err:
            best, best_err = len(path) - 1, mloo
        # the stop watches plain LOO; the model is chosen by modified LOO
        if loo < best_loo:
            best_loo, stall = loo, 0
        else:
            stall += 1
            if early_stop and stall >= window:
                break
    if not path:
        return SparseSolution(np.zeros(P), [], np.inf, {"solver": "omp", "n_terms": 0}, path)
    pick = len(path) - 1 if n_terms is not None or best is None else best
    step = path[pick]
    return SparseSolution.from_subset(
        P,
        step["active"],
        step["coef"],
        cv_error=step["mloo"],
        meta={"solver": "omp", "n_terms": len(step["active"]), "iterations": len(path)},
        path=path,
    )
