"""Least angle regression (plain, without LASSO sign removal) and hybrid LARS."""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg as sla

from .base import IncrementalQR, RegressionProblem, SparseSolution, column_norms
from .omp import early_stop_window, path_loo

log = logging.getLogger(__name__)


def lars(
    problem: RegressionProblem,
    hybrid: bool = True,
    max_terms: int | None = None,
    early_stop: bool = True,
) -> SparseSolution:
    """LARS path on unit-norm columns; best model by modified LOO of the OLS refit.

    Each path point ``i`` holds the active set ``A_i`` (``i`` columns) and the
    coefficients after the equiangular step. With ``hybrid=True`` the
    returned coefficients are the OLS refit on the chosen set, otherwise the
    LARS coefficients themselves.
    """
    A, b = problem.A, problem.b
    N, P = A.shape
    limit = min(P, N - 1) if max_terms is None else min(max_terms, N, P)
    norms = column_norms(A)
    Xn = A / norms
    qr = IncrementalQR(N, max(limit, 1))
    beta = np.zeros(P)
    mu = np.zeros(N)
    active: list[int] = []
    inactive = np.ones(P, dtype=bool)
    path = []
    best, best_err, best_loo, stall = None, np.inf, np.inf, 0
    window = early_stop_window(N, P)
    status = "complete"

    corr = Xn.T @ b
    j = int(np.argmax(np.abs(corr)))
    while True:
        if not qr.add(Xn[:, j]):
            status = "degenerate"
            log.warning("LARS: column %d collinear with active set; truncating path", j)
            break
        active.append(j)
        inactive[j] = False
        k = len(active)
        corr = Xn.T @ (b - mu)
        c_act = corr[active]
        C = np.max(np.abs(c_act))
        s = np.sign(c_act)
        R = qr.R[:k, :k]
        z = sla.cho_solve((R, False), s)
        AA = 1.0 / np.sqrt(s @ z)
        d = AA * z
        u = qr.Q[:, :k] @ (R @ d)  # = Xn[:, active] @ d
        if k >= limit or not inactive.any():
            gamma, j_next = C / AA, None
        else:
            a = Xn.T @ u
            cj, aj = corr[inactive], a[inactive]
            with np.errstate(divide="ignore", invalid="ignore"):
                g1 = (C - cj) / (AA - aj)
                g2 = (C + cj) / (AA + aj)
            tiny = 1e-12 * C
            g1[~(g1 > tiny)] = np.inf
            g2[~(g2 > tiny)] = np.inf
            g = np.minimum(g1, g2)
            if not np.isfinite(g).any():
                status = "degenerate"
                gamma, j_next = C / AA, None
            else:
                pos = int(np.argmin(g))
                gamma = min(g[pos], C / AA)
                j_next = int(np.flatnonzero(inactive)[pos])
        mu = mu + gamma * u
        beta[active] += gamma * d
        coef_ols_n = qr.solve(b)
        fitted = qr.Q[:, :k] @ (qr.Q[:, :k].T @ b)
        loo, mloo = path_loo(qr, b, fitted)
        path.append({
            "active": list(active),
            "coef": (beta[active] / norms[active]).copy(),
            "coef_ols": coef_ols_n / norms[active],
            "loo": loo,
            "mloo": mloo,
        })
        if mloo < best_err:
            best, best_err = len(path) - 1, mloo
        # the stop watches plain LOO; the model is chosen by modified LOO
        if loo < best_loo:
            best_loo, stall = loo, 0
        else:
            stall += 1
            if early_stop and stall >= window:
                status = "early-stop"
                break
        if j_next is None:
            break
        j = j_next

    name = "hybrid-lars" if hybrid else "lars"
    if not path:
        return SparseSolution(np.zeros(P), [], np.inf, {"solver": name}, path)
    step = path[best if best is not None else len(path) - 1]
    coef = step["coef_ols"] if hybrid else step["coef"]
    return SparseSolution.from_subset(
        P,
        step["active"],
        coef,
        cv_error=step["mloo"],
        meta={"solver": name, "n_terms": len(step["active"]), "iterations": len(path), "status": status},
        path=path,
    )
