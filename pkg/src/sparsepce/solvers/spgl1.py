"""Basis pursuit denoising via root finding on the LASSO Pareto curve.

``min ||c||_1  s.t.  ||A c - b||_2 <= sigma`` is solved by Newton's method
on ``phi(tau) - sigma`` where ``phi(tau)`` is the optimal residual norm of
the LASSO problem ``min ||A c - b||_2 s.t. ||c||_1 <= tau``. Each LASSO is
solved by spectral projected gradient (Barzilai-Borwein steps, nonmonotone
line search, projection onto the l1 ball).
"""

from __future__ import annotations

import logging

import numpy as np

from .base import RegressionProblem, SparseSolution

log = logging.getLogger(__name__)

FEAS_TOL = 1e-3
ROOT_TOL = 1e-4
NONMONOTONE = 10
STEP_MIN, STEP_MAX = 1e-10, 1e10


def project_l1(v: np.ndarray, tau: float) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{x : ||x||_1 <= tau}`` (sort based)."""
    if tau <= 0:
        return np.zeros_like(v)
    a = np.abs(v)
    if a.sum() <= tau:
        return v.copy()
    s = np.sort(a)[::-1]
    css = np.cumsum(s) - tau
    idx = np.arange(1, s.size + 1)
    rho = np.nonzero(s - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def lasso_spg(A, b, tau, x0=None, max_iter=10_000, opt_tol=1e-6, stop_below=None):
    """Solve ``min 0.5 ||A x - b||^2 s.t. ||x||_1 <= tau``.

    Returns ``(x, r, iterations, status)``. ``stop_below`` ends the solve as
    soon as the residual norm drops to that value.
    """
    P = A.shape[1]
    x = project_l1(np.zeros(P) if x0 is None else np.asarray(x0, float), tau)
    r = b - A @ x
    g = -(A.T @ r)
    f = 0.5 * (r @ r)
    hist = [f]
    gmax = np.max(np.abs(g)) if P else 0.0
    alpha = 1.0 / gmax if gmax > 0 else 1.0
    alpha = min(max(alpha, STEP_MIN), STEP_MAX)
    it = 0
    status = "maxiter"
    while it < max_iter:
        rnorm = np.sqrt(2 * f)
        if stop_below is not None and rnorm <= stop_below:
            status = "feasible"
            break
        # duality gap written without the O(||b||) cancelling terms
        gap = tau * np.max(np.abs(g)) + x @ g
        if f == 0 or gap <= opt_tol * f:
            status = "optimal"
            break
        fmax = max(hist[-NONMONOTONE:])
        step = 1.0
        while True:
            xn = project_l1(x - step * alpha * g, tau)
            dx = xn - x
            rn = b - A @ xn
            fn = 0.5 * (rn @ rn)
            if fn <= fmax + 1e-4 * (g @ dx) or step < 1e-12:
                break
            step *= 0.5
        it += 1
        if not np.any(dx):
            status = "stalled"
            break
        gn = -(A.T @ rn)
        sy = dx @ (gn - g)
        alpha = (dx @ dx) / sy if sy > 0 else STEP_MAX
        alpha = min(max(alpha, STEP_MIN), STEP_MAX)
        x, r, g, f = xn, rn, gn, fn
        hist.append(f)
    return x, r, it, status


def pareto_curve(A, b, taus, opt_tol=1e-10, max_iter=20_000) -> np.ndarray:
    """Residual norms ``phi(tau)`` of the LASSO solutions for increasing ``taus``."""
    x = None
    out = []
    for tau in taus:
        x, r, _, _ = lasso_spg(A, b, float(tau), x0=x, max_iter=max_iter, opt_tol=opt_tol)
        out.append(np.linalg.norm(r))
    return np.array(out)


def bpdn_spg(
    problem: RegressionProblem,
    sigma: float,
    max_newton: int = 30,
    max_iter: int = 10_000,
    opt_tol: float = 1e-6,
) -> SparseSolution:
    """SPGL1-style basis pursuit denoising on the (weighted) system.

    Returns the feasible iterate (``||r|| <= sigma (1 + 1e-3)``) with the
    smallest l1 norm. If none is reached within the Newton and SPG caps the
    last iterate is returned with ``meta["status"] == "maxiter"``.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    A, b = problem.A, problem.b
    P = A.shape[1]
    scale = np.linalg.norm(b)
    meta = {"solver": "spgl1", "sigma": float(sigma)}
    if scale <= sigma or scale == 0:
        return SparseSolution(np.zeros(P), [], meta={**meta, "status": "zero", "tau": 0.0, "iterations": 0})
    b1, s1 = b / scale, sigma / scale
    tau, x = 0.0, np.zeros(P)
    total = 0
    best = None
    status = "maxiter"
    newton = 0
    # one slow subproblem near the root must not eat the whole budget
    inner_cap = max(200, max_iter // max_newton)
    for newton in range(max_newton + 1):
        x, r, it, inner = lasso_spg(
            A, b1, tau, x0=x, max_iter=min(inner_cap, max_iter - total), opt_tol=opt_tol,
            stop_below=s1 * (1 + FEAS_TOL),
        )
        total += it
        rnorm = np.linalg.norm(r)
        if rnorm <= s1 * (1 + FEAS_TOL):
            l1 = np.abs(x).sum()
            if best is None or l1 < best[0]:
                best = (l1, x.copy(), rnorm, tau)
        if abs(rnorm - s1) <= ROOT_TOL * s1 or inner == "feasible":
            status = "converged"
            break
        if total >= max_iter:
            break
        g = A.T @ r
        slope = np.max(np.abs(g)) / rnorm if rnorm > 0 else 0.0
        if slope == 0:
            break
        tau = max(0.0, tau + (rnorm - s1) / slope)
    if best is None:
        log.warning("bpdn_spg: no feasible iterate within caps (residual %.3e, target %.3e)", rnorm, s1)
        best = (np.abs(x).sum(), x, rnorm, tau)
        status = "maxiter"
    elif status != "converged":
        status = "maxiter"
        log.warning("bpdn_spg: caps reached, returning best feasible iterate")
    coef = best[1] * scale
    return SparseSolution(
        coef,
        np.flatnonzero(coef),
        meta={**meta, "status": status, "tau": best[3] * scale, "iterations": total,
              "newton_steps": newton, "residual": best[2] * scale},
    )
