"""Independent probabilistic input models.

Each marginal knows how to sample itself, evaluate its density and map
between physical coordinates and the standardized coordinates in which
the polynomial basis is orthonormal:

* ``Uniform(a, b)``       -> affine map onto ``[-1, 1]`` (Legendre)
* ``Gaussian(mu, sigma)`` -> standard normal (Hermite)
* ``Lognormal(lam, zeta)`` -> standard normal of ``log x`` (Hermite)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

FAMILIES = ("uniform", "gaussian", "lognormal")


class SupportError(ValueError):
    """A physical point lies outside the support of its marginal."""


@dataclass(frozen=True)
class Marginal:
    """One-dimensional marginal distribution.

    ``params`` are in the family's natural units: ``(a, b)`` for uniform,
    ``(mu, sigma)`` for Gaussian and ``(lambda, zeta)`` (mean and standard
    deviation of ``log X``) for lognormal.
    """

    family: str
    params: tuple[float, float]

    def __post_init__(self):
        family = self.family.lower()
        if family in ("normal", "gauss"):
            family = "gaussian"
        if family not in FAMILIES:
            raise ValueError(f"unknown marginal family {self.family!r}")
        object.__setattr__(self, "family", family)
        p = tuple(float(v) for v in self.params)
        if len(p) != 2:
            raise ValueError("marginals take exactly two parameters")
        object.__setattr__(self, "params", p)
        if family == "uniform" and not p[0] < p[1]:
            raise ValueError("uniform marginal needs a < b")
        if family in ("gaussian", "lognormal") and not p[1] > 0:
            raise ValueError(f"{family} marginal needs a positive scale")

    @property
    def polynomial(self) -> str:
        """Orthonormal family for the standardized variable."""
        return "legendre" if self.family == "uniform" else "hermite"

    def _scipy(self):
        a, b = self.params
        if self.family == "uniform":
            return stats.uniform(loc=a, scale=b - a)
        if self.family == "gaussian":
            return stats.norm(loc=a, scale=b)
        return stats.lognorm(s=b, scale=np.exp(a))

    def pdf(self, x):
        return self._scipy().pdf(x)

    def cdf(self, x):
        return self._scipy().cdf(x)

    def ppf(self, q):
        return self._scipy().ppf(q)

    def median(self) -> float:
        return float(self.ppf(0.5))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        a, b = self.params
        if self.family == "uniform":
            return rng.uniform(a, b, size=n)
        if self.family == "gaussian":
            return rng.normal(a, b, size=n)
        return rng.lognormal(a, b, size=n)

    def to_standard(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.params
        if self.family == "uniform":
            if np.any((x < a) | (x > b)):
                raise SupportError(f"value outside [{a}, {b}]")
            return (2.0 * x - (a + b)) / (b - a)
        if self.family == "gaussian":
            return (x - a) / b
        if np.any(x <= 0):
            raise SupportError("lognormal values must be positive")
        return (np.log(x) - a) / b

    def from_standard(self, u):
        u = np.asarray(u, dtype=float)
        a, b = self.params
        if self.family == "uniform":
            return 0.5 * (a + b) + 0.5 * (b - a) * u
        if self.family == "gaussian":
            return a + b * u
        return np.exp(a + b * u)

    def to_config(self) -> dict:
        return {"family": self.family, "params": list(self.params)}


def Uniform(a: float, b: float) -> Marginal:
    return Marginal("uniform", (a, b))


def Gaussian(mu: float, sigma: float) -> Marginal:
    return Marginal("gaussian", (mu, sigma))


def Lognormal(lam: float, zeta: float) -> Marginal:
    return Marginal("lognormal", (lam, zeta))


@dataclass(frozen=True)
class InputModel:
    """Vector of independent marginals; joint density is their product."""

    marginals: tuple[Marginal, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) < 1:
            raise ValueError("an input model needs at least one marginal")

    @classmethod
    def iid(cls, marginal: Marginal, d: int) -> "InputModel":
        return cls((marginal,) * d)

    @property
    def dim(self) -> int:
        return len(self.marginals)

    @property
    def polynomials(self) -> tuple[str, ...]:
        return tuple(m.polynomial for m in self.marginals)

    def sample_iid(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` i.i.d. points in physical space, shape ``(n, d)``."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return np.column_stack([m.sample(n, rng) for m in self.marginals])

    def to_standard(self, x) -> np.ndarray:
        x = _as_points(x, self.dim)
        u = np.column_stack([m.to_standard(x[:, k]) for k, m in enumerate(self.marginals)])
        return u

    def from_standard(self, u) -> np.ndarray:
        u = _as_points(u, self.dim)
        return np.column_stack([m.from_standard(u[:, k]) for k, m in enumerate(self.marginals)])

    def from_quantiles(self, q) -> np.ndarray:
        q = _as_points(q, self.dim)
        return np.column_stack([m.ppf(q[:, k]) for k, m in enumerate(self.marginals)])

    def joint_pdf(self, x) -> np.ndarray:
        x = _as_points(x, self.dim)
        dens = np.ones(x.shape[0])
        for k, m in enumerate(self.marginals):
            dens *= m.pdf(x[:, k])
        return dens

    def to_config(self) -> list[dict]:
        return [m.to_config() for m in self.marginals]

    @classmethod
    def from_config(cls, block: Sequence[dict]) -> "InputModel":
        return cls(tuple(Marginal(item["family"], tuple(item["params"])) for item in block))


def _as_points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1) if x.size == d else x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[1] != d:
        raise ValueError(f"expected points with {d} columns, got shape {x.shape}")
    return x
