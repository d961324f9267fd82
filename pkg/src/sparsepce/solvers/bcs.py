"""Bayesian compressive sensing with a hierarchical Laplace prior.

Coefficients ``c_i ~ N(0, gamma_i)``, ``gamma_i ~ Exp(lambda / 2)`` with a
shared rate ``lambda`` (improper hyperprior, i.e. ``nu = 0``) and a fixed
noise precision ``beta``. The log-marginal likelihood is maximized one
``gamma_i`` at a time (add, re-estimate or delete a basis function,
whichever increases it most), re-estimating ``lambda`` in closed form
after every update.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg as sla

from .base import RegressionProblem, SparseSolution

log = logging.getLogger(__name__)


def _contribution(gamma, s, q, lam):
    """Log-marginal contribution of one basis function given leave-out ``s``, ``q``."""
    t = 1.0 + gamma * s
    return 0.5 * (-np.log(t) + q * q * gamma / t) - 0.5 * lam * gamma


def _stationary_gamma(s, q, lam):
    """Maximizer over ``gamma >= 0`` of :func:`_contribution`.

    Setting the derivative to zero gives ``lam t^2 + s t - q^2 = 0`` for
    ``t = 1 + gamma s``; a positive root with ``t > 1`` exists iff
    ``q^2 - s > lam``.
    """
    theta = q * q - s
    g = np.zeros_like(s)
    ok = theta > lam
    if lam > 0:
        so, qo = s[ok], q[ok]
        t = (-so + np.sqrt(so * so + 4.0 * lam * qo * qo)) / (2.0 * lam)
        g[ok] = (t - 1.0) / so
    else:
        g[ok] = theta[ok] / s[ok] ** 2
    return g


def bcs_fastlaplace(
    problem: RegressionProblem,
    beta: float,
    max_iter: int = 1000,
    tol: float = 1e-8,
) -> SparseSolution:
    """Sparse MAP estimate under the Laplace prior for noise precision ``beta``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    A, b = problem.A, problem.b
    N, P = A.shape
    meta = {"solver": "bcs", "beta": float(beta)}
    if not np.any(b):
        return SparseSolution(np.zeros(P), [], meta={**meta, "status": "zero", "iterations": 0})

    gram = A.T @ A
    Atb = A.T @ b
    diag = np.diag(gram).copy()
    usable = diag > 0
    S0 = beta * diag
    Q0 = beta * Atb

    # start from the single column with the largest projected energy
    score = np.where(usable, Atb**2 / np.where(usable, diag, 1.0), -np.inf)
    i0 = int(np.argmax(score))
    theta0 = Q0[i0] ** 2 - S0[i0]
    if theta0 <= 0:
        return SparseSolution(np.zeros(P), [], meta={**meta, "status": "empty", "iterations": 0})
    active = [i0]
    gamma = np.zeros(P)
    gamma[i0] = theta0 / S0[i0] ** 2
    lam = 0.0

    L_total = 0.0
    status = "maxiter"
    it = 0
    mu = np.zeros(1)
    for it in range(1, max_iter + 1):
        act = np.array(active)
        prec = beta * gram[np.ix_(act, act)] + np.diag(1.0 / gamma[act])
        chol = sla.cho_factor(prec)
        mu = beta * sla.cho_solve(chol, Atb[act])
        # S_i = beta phi_i^T phi_i - beta^2 phi_i^T Phi_A Sigma Phi_A^T phi_i
        Linv_G = sla.solve_triangular(chol[0], gram[act, :], trans="T", lower=chol[1])
        S = S0 - beta**2 * np.einsum("ij,ij->j", Linv_G, Linv_G)
        Q = Q0 - beta * gram[:, act] @ mu
        s, q = S.copy(), Q.copy()
        # leave-one-out quantities of active columns from the posterior directly,
        # avoiding the cancellation in S / (1 - gamma S) at high precision
        cinv = sla.solve_triangular(chol[0], np.eye(len(act)), lower=chol[1])
        sigma_diag = np.einsum("ij,ij->i", cinv, cinv)
        s[act] = 1.0 / sigma_diag - 1.0 / gamma[act]
        q[act] = mu / sigma_diag
        usable_now = usable & (s > 0)

        lam = 2.0 * (len(active) - 1) / gamma[act].sum() if len(active) > 1 else 0.0
        new_gamma = np.zeros(P)
        new_gamma[usable_now] = _stationary_gamma(s[usable_now], q[usable_now], lam)

        in_model = np.zeros(P, dtype=bool)
        in_model[act] = True
        gain = np.full(P, -np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            current = np.where(in_model, _contribution(gamma, s, q, lam), 0.0)
            proposed = _contribution(new_gamma, s, q, lam)
        proposed[~np.isfinite(proposed)] = -np.inf
        add = ~in_model & (new_gamma > 0)
        keep = in_model & (new_gamma > 0)
        drop = in_model & (new_gamma == 0)
        if len(active) == 1:
            drop[:] = False
        gain[add] = proposed[add]
        gain[keep] = proposed[keep] - current[keep]
        gain[drop] = -current[drop]
        j = int(np.argmax(gain))
        if not np.isfinite(gain[j]) or gain[j] <= tol * max(abs(L_total), 1.0):
            status = "converged"
            break
        L_total += gain[j]
        if add[j]:
            active.append(j)
            gamma[j] = new_gamma[j]
        elif keep[j]:
            gamma[j] = new_gamma[j]
        else:
            active.remove(j)
            gamma[j] = 0.0
    else:
        log.warning("bcs_fastlaplace: no convergence after %d iterations", max_iter)

    act = np.array(active)
    prec = beta * gram[np.ix_(act, act)] + np.diag(1.0 / gamma[act])
    mu = beta * sla.cho_solve(sla.cho_factor(prec), Atb[act])
    return SparseSolution.from_subset(
        P, act, mu, meta={**meta, "status": status, "iterations": it, "lambda": float(lam)}
    )
