"""Subspace pursuit for a fixed sparsity ``K`` and its cross-validated sweep."""

from __future__ import annotations

import logging

import numpy as np

from ..selection import CvSpec, DegenerateLeverageError, fold_assignment, kfold_cv_folds, loo_ols
from .base import RegressionProblem, SingularMatrixError, SparseSolution, column_norms

log = logging.getLogger(__name__)


class ParameterError(ValueError):
    pass


def _top(values: np.ndarray, K: int, exclude=None) -> np.ndarray:
    v = np.abs(values).astype(float)
    if exclude is not None and len(exclude):
        v[np.asarray(exclude)] = -1.0
    return np.sort(np.argsort(-v, kind="stable")[:K])


def _lsq(A, b, cols):
    coef, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
    return coef, b - A[:, cols] @ coef


def _sp_core(A: np.ndarray, b: np.ndarray, K: int):
    norms = column_norms(A)
    An = A / norms
    act = _top(An.T @ b, K)
    coef, res = _lsq(A, b, act)
    rnorm = np.linalg.norm(res)
    history = [rnorm]
    status = "maxiter"
    for _ in range(10 * K):
        extra = _top(An.T @ res, K, exclude=act)
        cand = np.union1d(act, extra)
        c_cand, _ = _lsq(A, b, cand)
        new = np.sort(cand[_top(c_cand * norms[cand], K)])
        c_new, r_new = _lsq(A, b, new)
        rn_new = np.linalg.norm(r_new)
        if rn_new >= rnorm:
            status = "converged"
            break
        act, coef, res, rnorm = new, c_new, r_new, rn_new
        history.append(rnorm)
    else:
        log.warning("subspace pursuit hit the %d-iteration guard", 10 * K)
    return act, coef, history, status


def subspace_pursuit(problem: RegressionProblem, K: int) -> SparseSolution:
    """Subspace pursuit with sparsity ``K``; requires ``2K <= min(N, P)``."""
    N, P = problem.N, problem.P
    if K < 1 or 2 * K > min(N, P):
        raise ParameterError(f"subspace pursuit needs 1 <= K and 2K <= min(N, P) = {min(N, P)}; got K={K}")
    act, coef, history, status = _sp_core(problem.A, problem.b, K)
    sol = SparseSolution.from_subset(
        P, act, coef, meta={"solver": "sp", "K": K, "iterations": len(history), "status": status}
    )
    sol.meta["residual_history"] = history
    sol.meta["support"] = [int(i) for i in act]
    return sol


def k_grid(N: int, P: int, n_values: int = 10) -> np.ndarray:
    """``n_values`` near-geometric sparsities in ``[1, floor(min(N, P) / 2)]``.

    Rounded geometric values are pushed apart so the grid keeps
    ``n_values`` distinct entries whenever the range allows it.
    """
    kmax = min(N, P) // 2
    if kmax < 1:
        return np.array([], dtype=int)
    if kmax <= n_values:
        return np.arange(1, kmax + 1)
    k = np.round(np.geomspace(1, kmax, n_values)).astype(int)
    for i in range(1, n_values):
        k[i] = max(k[i], k[i - 1] + 1)
    for i in range(n_values - 2, -1, -1):
        k[i] = min(k[i], k[i + 1] - 1)
    return k


def _sp_coefficients(tr: RegressionProblem, K: int) -> np.ndarray:
    act, coef, _, _ = _sp_core(tr.A, tr.b, K)
    c = np.zeros(tr.P)
    c[act] = coef
    return c


def sp_sweep(problem: RegressionProblem, cv: CvSpec | None = None, grid=None) -> SparseSolution:
    """Run subspace pursuit over a ``K`` grid and keep the ``K`` with the best CV error.

    ``cv=CvSpec.loo()`` scores each support by the closed-form LOO of its
    OLS refit; ``CvSpec.kfold(k)`` reruns the pursuit on every training fold.
    """
    cv = CvSpec.kfold(4) if cv is None else cv
    N, P = problem.N, problem.P
    grid = k_grid(N, P) if grid is None else np.asarray(grid, dtype=int)
    if grid.size == 0:
        raise ParameterError("no feasible sparsity value")
    A, b = problem.A, problem.b
    errors = []
    if cv.kind == "loo":
        for K in grid:
            act, _, _, _ = _sp_core(A, b, int(K))
            try:
                errors.append(loo_ols(A[:, act], b))
            except (DegenerateLeverageError, SingularMatrixError):
                errors.append(np.inf)
    else:
        folds = fold_assignment(N, cv.k, cv.fold_seed)
        for K in grid:
            errors.append(kfold_cv_folds(lambda tr, K=int(K): _sp_coefficients(tr, K), problem, folds))
    errors = np.asarray(errors)
    pick = int(np.argmin(errors))
    K = int(grid[pick])
    sol = subspace_pursuit(problem, K)
    sol.cv_error = float(errors[pick])
    sol.meta.update({
        "solver": "sp_loo" if cv.kind == "loo" else "sp",
        "cv": cv.kind if cv.kind == "loo" else f"kfold{cv.k}",
        "k_grid": [int(k) for k in grid],
        "cv_errors": [float(e) for e in errors],
    })
    return sol
