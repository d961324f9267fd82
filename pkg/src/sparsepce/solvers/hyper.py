"""Solvers wrapped with their benchmark hyperparameter grids and selection rules."""

from __future__ import annotations

import numpy as np

from ..selection import CvSpec, fold_assignment, kfold_cv_folds
from .base import RegressionProblem, SparseSolution
from .bcs import bcs_fastlaplace
from .lars import lars
from .omp import omp
from .sp import k_grid, sp_sweep
from .spgl1 import bpdn_spg

SOLVERS = ("omp", "lars", "sp", "sp_loo", "spgl1", "bcs")
RELMSE_GRID = np.logspace(-16, -1, 16)
DEFAULT_KFOLD = {"sp": 4, "spgl1": 5, "bcs": 5}


def _check(solver_id):
    if solver_id not in SOLVERS:
        raise ValueError(f"unknown solver {solver_id!r}; choose from {SOLVERS}")


def hyperparameter_grid(solver_id: str, N: int, P: int, y=None) -> dict:
    """The hyperparameter values a solver is tuned over for an ``N x P`` problem.

    OMP/LARS: sparsity ``K`` in ``[1, min(P, N - 1)]``.
    SP: 10 geometric ``K`` values with ``2K <= min(N, P)``.
    SPGL1/BCS: ``sigma^2 = N var(y) rho`` for 16 log-spaced ``rho`` in ``[1e-16, 1e-1]``.
    """
    _check(solver_id)
    if solver_id in ("omp", "lars"):
        return {"name": "K", "values": np.arange(1, min(P, N - 1) + 1)}
    if solver_id in ("sp", "sp_loo"):
        return {"name": "K", "values": k_grid(N, P)}
    var = float(np.var(y, ddof=1)) if y is not None else 1.0
    return {"name": "sigma2", "values": N * var * RELMSE_GRID, "relative": RELMSE_GRID.copy()}


def _sigma_from_rho(b, rho):
    return float(np.sqrt(b.size * np.var(b, ddof=1) * rho))


def _fit(solver_id, tr: RegressionProblem, rho: float) -> SparseSolution:
    sigma = _sigma_from_rho(tr.b, rho)
    if solver_id == "spgl1":
        return bpdn_spg(tr, sigma)
    # noise variance per sample sigma^2 / N, precision is its inverse
    noise_var = max(sigma**2 / tr.N, np.finfo(float).tiny)
    return bcs_fastlaplace(tr, 1.0 / noise_var)


def solve_with_hyperparameters(
    solver_id: str,
    problem: RegressionProblem,
    selection: CvSpec | None = None,
) -> SparseSolution:
    """Run ``solver_id`` with its grid and CV rule; record the winner and its CV error.

    Defaults: OMP and hybrid LARS select ``K`` by modified LOO along their
    path; SP by 4-fold CV; SP_LOO by closed-form LOO; SPGL1 and BCS by
    5-fold CV over the relative ``sigma^2`` grid.
    """
    _check(solver_id)
    if solver_id == "omp":
        sol = omp(problem)
    elif solver_id == "lars":
        sol = lars(problem, hybrid=True)
    elif solver_id == "sp":
        sol = sp_sweep(problem, selection or CvSpec.kfold(DEFAULT_KFOLD["sp"]))
    elif solver_id == "sp_loo":
        sol = sp_sweep(problem, selection or CvSpec.loo())
    else:
        spec = selection or CvSpec.kfold(DEFAULT_KFOLD[solver_id])
        k = problem.N if spec.kind == "loo" else spec.k
        folds = fold_assignment(problem.N, k, spec.fold_seed)
        errors = np.array([
            kfold_cv_folds(lambda tr, r=rho: _fit(solver_id, tr, r).coefficients, problem, folds)
            for rho in RELMSE_GRID
        ])
        pick = int(np.nanargmin(np.where(np.isfinite(errors), errors, np.nan))) if np.isfinite(errors).any() else 0
        sol = _fit(solver_id, problem, float(RELMSE_GRID[pick]))
        sol.cv_error = float(errors[pick])
        sol.meta.update({
            "relmse_grid": RELMSE_GRID.tolist(),
            "cv_errors": errors.tolist(),
            "rho": float(RELMSE_GRID[pick]),
            "cv": spec.kind if spec.kind == "loo" else f"kfold{spec.k}",
        })
    sol.meta["solver"] = solver_id
    sol.meta["hyperparameter"] = _winner(solver_id, sol)
    return sol


def _winner(solver_id, sol):
    if solver_id in ("omp", "lars"):
        return sol.meta.get("n_terms")
    if solver_id in ("sp", "sp_loo"):
        return sol.meta.get("K")
    return sol.meta.get("rho")
