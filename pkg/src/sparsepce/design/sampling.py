"""Point samplers: Monte Carlo, maximin LHS, asymptotic and coherence-optimal."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.spatial.distance import pdist

from ..basis import MultiIndexSet, tight_bound, univariate_table
from ..inputs import InputModel
from .core import Design

log = logging.getLogger(__name__)

MIN_ACCEPTANCE = 1e-6
GAMMA_SAFETY = 1.1

_BOUND_CACHE: dict = {}


def _check_n(n):
    if n < 1:
        raise ValueError("n must be at least 1")


def mc_design(input_model: InputModel, n: int, rng: np.random.Generator) -> Design:
    _check_n(n)
    x = input_model.sample_iid(n, rng)
    return Design.from_physical(input_model, x, sampler="mc", n=n)


def _lhs_quantiles(n, d, rng):
    q = np.empty((n, d))
    for k in range(d):
        q[:, k] = (rng.permutation(n) + rng.random(n)) / n
    return q


def lhs_maximin(input_model: InputModel, n: int, rng: np.random.Generator, n_tries: int = 20) -> Design:
    """Best of ``n_tries`` Latin hypercubes by minimal pairwise distance in quantile space."""
    _check_n(n)
    if n_tries < 1:
        raise ValueError("n_tries must be at least 1")
    best, best_dist = None, -np.inf
    for _ in range(n_tries):
        q = _lhs_quantiles(n, input_model.dim, rng)
        dist = pdist(q).min() if n > 1 else 0.0
        if dist > best_dist:
            best, best_dist = q, dist
    x = input_model.from_quantiles(best)
    return Design.from_physical(input_model, x, sampler="lhs", n=n, n_tries=n_tries, maximin=float(best_dist))


def _families_kind(input_model: InputModel) -> str:
    fams = set(input_model.polynomials)
    if fams == {"legendre"}:
        return "uniform"
    if fams == {"hermite"}:
        return "gaussian"
    return "mixed"


def asymptotic_radius(p: int) -> float:
    return math.sqrt(2.0) * math.sqrt(2 * p + 1)


def cohopt_radius(p: int) -> float:
    return math.sqrt(2.0) * math.sqrt(2 * p + 2)


def uniform_ball(n: int, d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform in the ``d``-ball of the given radius."""
    z = rng.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * (radius * rng.random(n) ** (1.0 / d))[:, None]


def asymptotic_design(input_model: InputModel, p: int, n: int, rng: np.random.Generator) -> Design:
    """Chebyshev (uniform inputs) or ball-uniform (Gaussian inputs) weighted design."""
    _check_n(n)
    kind = _families_kind(input_model)
    d = input_model.dim
    if kind == "uniform":
        u = np.cos(np.pi * rng.random((n, d)))
        w = np.prod((1.0 - u**2) ** 0.25, axis=1)
    elif kind == "gaussian":
        u = uniform_ball(n, d, asymptotic_radius(p), rng)
        w = np.exp(-0.25 * np.sum(u**2, axis=1))
    else:
        raise ValueError("asymptotic sampling needs all-uniform or all-Gaussian inputs")
    # cos(pi * 0) = 1 would give a zero weight; probability 2^-53 but keep weights positive
    w = np.maximum(w, np.finfo(float).tiny)
    return Design.from_standard(input_model, u, w, sampler="asymptotic", n=n, p=p)


class _Proposal:
    """Product proposal in standardized space and the density ratio to the target.

    Uniform marginals: uniform on [-1, 1]. Gaussian marginals: standard
    normal when ``d >= p``, otherwise uniform on the ball of radius
    ``sqrt(2) sqrt(2p + 2)`` over the Gaussian coordinates. The target
    ``B^2 f`` is restricted to that ball in both cases.
    """

    def __init__(self, input_model: InputModel, p: int):
        fams = np.array(input_model.polynomials)
        self.d = input_model.dim
        self.gauss = np.flatnonzero(fams == "hermite")
        self.unif = np.flatnonzero(fams == "legendre")
        self.radius = cohopt_radius(p)
        self.ball = self.gauss.size > 0 and self.d < p

    def draw(self, n, rng):
        u = np.empty((n, self.d))
        if self.unif.size:
            u[:, self.unif] = rng.uniform(-1.0, 1.0, (n, self.unif.size))
        if self.gauss.size:
            if self.ball:
                u[:, self.gauss] = uniform_ball(n, self.gauss.size, self.radius, rng)
            else:
                u[:, self.gauss] = rng.standard_normal((n, self.gauss.size))
        return u

    def factor(self, u):
        """``f / f_prop`` up to a constant, zero outside the ball."""
        if not self.gauss.size:
            return np.ones(u.shape[0])
        r2 = np.sum(u[:, self.gauss] ** 2, axis=1)
        inside = r2 <= self.radius**2
        base = np.exp(-0.5 * r2) if self.ball else np.ones_like(r2)
        return np.where(inside, base, 0.0)

    def axis_grid(self, k, n_grid):
        lim = self.radius if k in self.gauss else 1.0
        return np.linspace(-lim, lim, n_grid)

    def axis_factor(self, k, t):
        if k in self.gauss and self.ball:
            return np.exp(-0.5 * t**2)
        return np.ones_like(t)


def rejection_bound(families, indexset: MultiIndexSet, proposal: _Proposal, n_grid: int | None = None) -> float:
    """Upper bound of ``B(u)^2 f(u) / f_prop(u)`` on the support, inflated by 1.1.

    Dense grid supremum for ``d <= 2``. For larger ``d`` the product bound
    ``max_alpha prod_k M_k(alpha_k)`` with ``M_k(j) = sup_t psi_j(t)^2 h_k(t)``.
    """
    key = (tuple(families), indexset.alphas.tobytes(), indexset.d, proposal.ball, proposal.radius, n_grid)
    if key not in _BOUND_CACHE:
        if len(_BOUND_CACHE) > 64:
            _BOUND_CACHE.clear()
        _BOUND_CACHE[key] = _rejection_bound(families, indexset, proposal, n_grid)
    return _BOUND_CACHE[key]


def _rejection_bound(families, indexset, proposal, n_grid):
    d = indexset.d
    if d <= 2:
        n_grid = n_grid or (4001 if d == 1 else 601)
        axes = [proposal.axis_grid(k, n_grid) for k in range(d)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        vals = tight_bound(families, indexset, mesh) ** 2 * proposal.factor(mesh)
        return GAMMA_SAFETY * float(vals.max())
    n_grid = n_grid or 4001
    degs = indexset.max_degrees()
    log_m = []
    for k in range(d):
        t = proposal.axis_grid(k, n_grid)
        table = univariate_table(families[k], int(degs[k]), t) ** 2
        m = np.max(table * proposal.axis_factor(k, t)[:, None], axis=0)
        log_m.append(np.log(m))
    alphas = indexset.alphas
    total = np.zeros(len(indexset))
    for k in range(d):
        total += log_m[k][alphas[:, k]]
    return GAMMA_SAFETY * float(np.exp(total.max()))


def coherence_optimal_design(
    input_model: InputModel,
    indexset: MultiIndexSet,
    n: int,
    rng: np.random.Generator,
    p: int | None = None,
    gamma: float | None = None,
    batch: int | None = None,
) -> Design:
    """Rejection sampling from ``B(u)^2 f(u)`` with weights ``1 / B(u)``.

    ``p`` (the basis degree) decides the Gaussian proposal and support
    radius; it defaults to the largest total degree of ``indexset``.
    """
    _check_n(n)
    families = input_model.polynomials
    if indexset.d != input_model.dim:
        raise ValueError("index set and input model dimensions differ")
    p = int(indexset.total_degrees().max()) if p is None else p
    prop = _Proposal(input_model, p)
    if gamma is None:
        gamma = rejection_bound(families, indexset, prop)
    batch = batch or max(4 * n, 1000)
    accepted, tried, violations = [], 0, 0
    count = 0
    while count < n:
        u = prop.draw(batch, rng)
        b = tight_bound(families, indexset, u)
        ratio = b**2 * prop.factor(u) / gamma
        violations += int(np.sum(ratio > 1.0))
        keep = rng.random(batch) <= ratio
        accepted.append((u[keep], b[keep]))
        count += int(keep.sum())
        tried += batch
        rate = count / tried
        if tried >= 10.0 / MIN_ACCEPTANCE and rate < MIN_ACCEPTANCE:
            raise RuntimeError(
                f"coherence-optimal sampling: acceptance rate {rate:.2e} after {tried} proposals "
                f"(gamma={gamma:.3e}); the rejection bound is too loose for this basis"
            )
        if count < n:
            # size the next batch from the observed acceptance rate
            batch = int(min(max(1000, 1.2 * (n - count) / max(rate, 1e-4)), 200_000))
    if violations:
        log.warning("coherence-optimal sampling: %d proposals exceeded the rejection bound", violations)
    u = np.concatenate([a for a, _ in accepted])[:n]
    b = np.concatenate([c for _, c in accepted])[:n]
    return Design.from_standard(
        input_model, u, 1.0 / b, sampler="coherence_optimal", n=n, p=p,
        gamma=gamma, acceptance=count / tried, proposal="ball" if prop.ball else "input",
    )
