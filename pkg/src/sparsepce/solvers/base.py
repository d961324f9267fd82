"""Problem/solution containers and the dense least-squares kernel."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

RANK_TOL = 1e-10


class SingularMatrixError(np.linalg.LinAlgError):
    """Active columns are (numerically) linearly dependent."""

    def __init__(self, msg, column=None):
        super().__init__(msg)
        self.column = column


@dataclass
class RegressionProblem:
    """``W Psi c ~ W y`` with optional diagonal weights ``W``."""

    psi: np.ndarray
    y: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.psi = np.atleast_2d(np.asarray(self.psi, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.psi.shape[0] != self.y.size:
            raise ValueError(f"Psi has {self.psi.shape[0]} rows but y has {self.y.size} entries")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).ravel()
            if self.weights.size != self.y.size:
                raise ValueError("one weight per row required")
            if np.any(self.weights <= 0):
                raise ValueError("weights must be strictly positive")

    @property
    def N(self) -> int:
        return self.psi.shape[0]

    @property
    def P(self) -> int:
        return self.psi.shape[1]

    @property
    def A(self) -> np.ndarray:
        if self.weights is None:
            return self.psi
        return self.psi * self.weights[:, None]

    @property
    def b(self) -> np.ndarray:
        if self.weights is None:
            return self.y
        return self.y * self.weights

    def rows(self, idx) -> "RegressionProblem":
        idx = np.asarray(idx, dtype=int)
        w = None if self.weights is None else self.weights[idx]
        return RegressionProblem(self.psi[idx], self.y[idx], w)


@dataclass
class SparseSolution:
    coefficients: np.ndarray
    active_set: np.ndarray
    cv_error: float = float("nan")
    meta: dict = field(default_factory=dict)
    path: list | None = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self.active_set = np.asarray(sorted(int(i) for i in self.active_set), dtype=int)

    @classmethod
    def from_subset(cls, P, active, coef, **kw) -> "SparseSolution":
        c = np.zeros(P)
        active = np.asarray(active, dtype=int)
        c[active] = coef
        keep = active[np.asarray(coef) != 0] if len(active) else active
        return cls(c, keep, **kw)

    @property
    def n_active(self) -> int:
        return int(self.active_set.size)

    def to_dict(self) -> dict:
        return {
            "coefficients": {str(int(i)): float(self.coefficients[i]) for i in self.active_set},
            "n_terms": int(self.coefficients.size),
            "active_set": [int(i) for i in self.active_set],
            "cv_error": None if not np.isfinite(self.cv_error) else float(self.cv_error),
            "meta": _jsonable(self.meta),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SparseSolution":
        d = json.loads(text)
        c = np.zeros(d["n_terms"])
        for k, v in d["coefficients"].items():
            c[int(k)] = v
        cv = d["cv_error"] if d["cv_error"] is not None else float("nan")
        return cls(c, d["active_set"], cv, d["meta"])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def lstsq_subset(A: np.ndarray, b: np.ndarray, active) -> np.ndarray:
    """Least squares on the columns ``active`` via Householder QR."""
    active = np.asarray(active, dtype=int)
    if active.size == 0:
        return np.zeros(0)
    sub = A[:, active]
    if active.size > sub.shape[0]:
        raise SingularMatrixError(
            f"{active.size} columns but only {sub.shape[0]} rows", column=int(active[sub.shape[0]])
        )
    q, r = np.linalg.qr(sub)
    diag = np.abs(np.diag(r))
    scale = max(np.linalg.norm(sub, axis=0).max(), np.finfo(float).tiny)
    bad = np.nonzero(diag <= RANK_TOL * scale)[0]
    if bad.size:
        raise SingularMatrixError(
            f"active column {int(active[bad[0]])} is linearly dependent on earlier ones",
            column=int(active[bad[0]]),
        )
    return sla.solve_triangular(r, q.T @ b)


def ols(problem: RegressionProblem, active=None) -> np.ndarray:
    """Weighted least-squares coefficients on ``active`` (all columns by default)."""
    if active is None:
        active = np.arange(problem.P)
    return lstsq_subset(problem.A, problem.b, active)


def column_norms(A: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(A, axis=0)
    n[n == 0] = 1.0
    return n


class IncrementalQR:
    """Thin QR of a growing column set, updated one column at a time.

    Keeps ``Q`` (N x k, orthonormal columns) and upper-triangular ``R`` so
    greedy paths cost O(kN) per added column instead of a fresh factorization.
    Classical Gram-Schmidt with one reorthogonalization pass.
    """

    def __init__(self, n_rows: int, capacity: int):
        self.Q = np.zeros((n_rows, capacity))
        self.R = np.zeros((capacity, capacity))
        self.k = 0

    def add(self, col: np.ndarray, tol: float = RANK_TOL) -> bool:
        k = self.k
        if k >= self.Q.shape[1] or k >= self.Q.shape[0]:
            return False
        v = np.array(col, dtype=float)
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            return False
        Qk = self.Q[:, :k]
        h = Qk.T @ v
        v -= Qk @ h
        h2 = Qk.T @ v
        v -= Qk @ h2
        h += h2
        nv = np.linalg.norm(v)
        if nv <= tol * norm0:
            return False
        self.R[:k, k] = h
        self.R[k, k] = nv
        self.Q[:, k] = v / nv
        self.k += 1
        return True

    def solve(self, b: np.ndarray) -> np.ndarray:
        k = self.k
        return sla.solve_triangular(self.R[:k, :k], self.Q[:, :k].T @ b)

    def leverages(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.Q[:, : self.k], self.Q[:, : self.k])

    def trace_inv_gram(self) -> float:
        """``tr[(A^T A)^{-1}] = ||R^{-1}||_F^2`` for the current columns."""
        k = self.k
        rinv = sla.solve_triangular(self.R[:k, :k], np.eye(k))
        return float(np.sum(rinv**2))
