"""Error estimators used for hyperparameter and model selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .solvers.base import RegressionProblem, SingularMatrixError

LEVERAGE_TOL = 1e-12


class DegenerateLeverageError(ValueError):
    """Some hat-matrix diagonal entry is (numerically) one."""


def _variance(y) -> float:
    return float(np.var(y, ddof=1))


def loo_from_factors(q: np.ndarray, y: np.ndarray, coef_fit: np.ndarray) -> float:
    """Relative LOO error given thin-Q of the active matrix and its fitted values."""
    h = np.einsum("ij,ij->i", q, q)
    if np.any(h >= 1.0 - LEVERAGE_TOL):
        raise DegenerateLeverageError("leave-one-out undefined: leverage of 1")
    resid = (y - coef_fit) / (1.0 - h)
    var = _variance(y)
    if var == 0:
        return 0.0 if np.allclose(resid, 0) else np.inf
    return float(np.mean(resid**2) / var)


def _qr_active(psi_active):
    psi_active = np.atleast_2d(np.asarray(psi_active, dtype=float))
    N, Pa = psi_active.shape
    if Pa >= N:
        raise DegenerateLeverageError(f"need N > P_active, got N={N}, P_active={Pa}")
    q, r = np.linalg.qr(psi_active)
    d = np.abs(np.diag(r))
    if np.any(d <= 1e-12 * max(d.max(), 1e-300)):
        raise SingularMatrixError("active matrix is rank deficient")
    return q, r


def loo_ols(psi_active, y) -> float:
    """Closed-form relative LOO error of the OLS fit on ``psi_active``.

    ``mean(((y_i - yhat_i) / (1 - h_i))**2) / var(y)`` with ``h`` the
    diagonal of the hat matrix.
    """
    y = np.asarray(y, dtype=float)
    q, _ = _qr_active(psi_active)
    return loo_from_factors(q, y, q @ (q.T @ y))


def correction_factor(N: int, Pa: int, trace_inv_gram: float) -> float:
    if N <= Pa:
        raise DegenerateLeverageError("correction factor needs N > P_active")
    return N / (N - Pa) * (1.0 + trace_inv_gram)


def modified_loo(psi_active, y) -> float:
    """LOO error times the small-sample correction ``N/(N-P)(1 + tr[(Psi^T Psi)^-1])``."""
    y = np.asarray(y, dtype=float)
    q, r = _qr_active(psi_active)
    rinv = np.linalg.inv(r)
    T = correction_factor(q.shape[0], q.shape[1], float(np.sum(rinv**2)))
    return loo_from_factors(q, y, q @ (q.T @ y)) * T


@dataclass(frozen=True)
class CvSpec:
    kind: str = "loo"
    k: int | None = None
    fold_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("loo", "kfold"):
            raise ValueError("cv kind must be 'loo' or 'kfold'")
        if self.kind == "kfold" and (self.k is None or self.k < 2):
            raise ValueError("k-fold CV needs k >= 2")

    @classmethod
    def kfold(cls, k: int, fold_seed: int = 0) -> "CvSpec":
        return cls("kfold", k, fold_seed)

    @classmethod
    def loo(cls) -> "CvSpec":
        return cls("loo")


def fold_assignment(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded random permutation of ``range(n)`` split into ``k`` near-equal blocks."""
    if not 2 <= k <= n:
        raise ValueError(f"k-fold CV needs 2 <= k <= N, got k={k}, N={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(block) for block in np.array_split(perm, k)]


def kfold_cv(
    fit: Callable[[RegressionProblem], np.ndarray],
    problem: RegressionProblem,
    spec: CvSpec,
) -> float:
    """Mean held-out squared error over folds, relative to ``var(Wy)``.

    ``fit`` maps a training problem to a full-length coefficient vector.
    """
    k = problem.N if spec.kind == "loo" else spec.k
    folds = fold_assignment(problem.N, k, spec.fold_seed)
    return kfold_cv_folds(fit, problem, folds)


def kfold_cv_folds(fit, problem: RegressionProblem, folds) -> float:
    everything = np.arange(problem.N)
    A, b = problem.A, problem.b
    errs = []
    for test in folds:
        train = np.setdiff1d(everything, test)
        if train.size == 0:
            raise ValueError("empty training fold")
        c = fit(problem.rows(train))
        errs.append(np.mean((b[test] - A[test] @ c) ** 2))
    var = _variance(b)
    if var == 0:
        return 0.0 if np.allclose(errs, 0) else np.inf
    return float(np.mean(errs) / var)


def relmse(y_true, y_pred) -> float:
    """Sum of squared errors over sum of squared deviations from the mean of ``y_true``."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    denom = np.sum((y_true - y_true.mean()) ** 2)
    if denom == 0:
        raise ValueError("validation outputs have zero variance")
    return float(np.sum((y_true - y_pred) ** 2) / denom)


def validation_relmse(surrogate, model, input_model, n_val: int, rng) -> float:
    """RelMSE of ``surrogate`` against ``model`` on a fresh i.i.d. validation set."""
    if n_val < 2:
        raise ValueError("n_val must be >= 2")
    x = input_model.sample_iid(n_val, rng)
    return relmse(model(x), surrogate(x))
