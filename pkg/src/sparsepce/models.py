"""Analytical benchmark models with their inputs and default basis settings."""

from __future__ import annotations

import io
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import MultiIndexSet, TruncationSpec, enumerate_truncation
from .inputs import Gaussian, InputModel, Lognormal, Uniform

ISHIGAMI_A, ISHIGAMI_B = 7.0, 0.1


def _points(x, d):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[1] != d:
        raise ValueError(f"expected {d} input columns, got {x.shape[1]}")
    return x


def ishigami(x, a: float = ISHIGAMI_A, b: float = ISHIGAMI_B) -> np.ndarray:
    x = _points(x, 3)
    s1 = np.sin(x[:, 0])
    return s1 + a * np.sin(x[:, 1]) ** 2 + b * x[:, 2] ** 4 * s1


BOREHOLE_NAMES = ("r_w", "L", "K_w", "T_u", "T_l", "H_u", "H_l", "r")


def borehole(x) -> np.ndarray:
    """Water flow through a borehole; columns ordered as :data:`BOREHOLE_NAMES`."""
    x = _points(x, 8)
    rw, L, Kw, Tu, Tl, Hu, Hl, r = x.T
    if np.any(rw <= 0) or np.any(r <= rw):
        raise ValueError("borehole needs 0 < r_w < r")
    if np.any(L <= 0) or np.any(Kw <= 0) or np.any(Tu <= 0) or np.any(Tl <= 0):
        raise ValueError("borehole needs positive L, K_w, T_u, T_l")
    lg = np.log(r / rw)
    return 2 * np.pi * Tu * (Hu - Hl) / (lg * (1 + 2 * L * Tu / (lg * rw**2 * Kw) + Tu / Tl))


def hundred_d(x) -> np.ndarray:
    x = _points(x, 100)
    d = 100
    i = np.arange(1, d + 1)
    out = (
        3.0
        - 5.0 / d * (x @ i)
        + 1.0 / d * (x**3 @ i)
        + 1.0 / (3 * d) * (np.log(x**2 + x**4) @ i)
    )
    # 1-based indices in the formula
    X = lambda k: x[:, k - 1]  # noqa: E731
    return out + X(1) * X(2) ** 2 + X(2) * X(4) - X(3) * X(5) + X(51) + X(50) * X(54) ** 2


def ishigami_input() -> InputModel:
    return InputModel.iid(Uniform(-np.pi, np.pi), 3)


def borehole_input() -> InputModel:
    # 0.0161812 is read as the standard deviation of r_w
    return InputModel((
        Gaussian(0.10, 0.0161812),
        Uniform(1120, 1680),
        Uniform(9855, 12045),
        Uniform(63070, 115600),
        Uniform(63.1, 116),
        Uniform(990, 1110),
        Uniform(700, 820),
        Lognormal(7.71, 1.0056),
    ))


def hundred_d_input() -> InputModel:
    margs = [Uniform(1, 2)] * 100
    margs[19] = Uniform(1, 3)
    return InputModel(tuple(margs))


@dataclass
class BenchmarkModel:
    """A model, its input distribution and its default truncation."""

    name: str
    input: InputModel
    evaluate: Callable[[np.ndarray], np.ndarray]
    p: int
    q: float
    n_max: int
    presets: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.input.dim

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.evaluate(x), dtype=float).ravel()

    def truncation(self, preset: str | None = None) -> TruncationSpec:
        if preset is None or preset == "default":
            return TruncationSpec(self.p, self.q)
        if preset not in self.presets:
            raise KeyError(f"model {self.name!r} has no preset {preset!r}")
        p, q = self.presets[preset]
        return TruncationSpec(p, q)

    def basis(self, preset: str | None = None) -> MultiIndexSet:
        return enumerate_truncation(self.d, self.truncation(preset))


def registry() -> dict[str, BenchmarkModel]:
    return {
        "ishigami": BenchmarkModel("ishigami", ishigami_input(), ishigami, 14, 1.0, 200, {"small": (12, 1.0)}),
        "borehole": BenchmarkModel("borehole", borehole_input(), borehole, 5, 1.0, 300, {"small": (4, 1.0)}),
        "hundred_d": BenchmarkModel("hundred_d", hundred_d_input(), hundred_d, 4, 0.5, 1400),
    }


def get_model(name: str, extra: dict[str, BenchmarkModel] | None = None) -> BenchmarkModel:
    models = {**registry(), **(extra or {})}
    if name not in models:
        raise KeyError(f"unknown model {name!r}; known: {sorted(models)}")
    return models[name]


class ExternalModel:
    """Model run as a subprocess: CSV rows of inputs on stdin, one scalar per line on stdout."""

    def __init__(self, command: Sequence[str], timeout: float | None = None):
        self.command = list(command)
        self.timeout = timeout

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        buf = io.StringIO()
        np.savetxt(buf, x, delimiter=",", fmt="%.17g")
        proc = subprocess.run(
            self.command, input=buf.getvalue(), capture_output=True, text=True,
            timeout=self.timeout, check=False,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"external model exited with {proc.returncode}: {proc.stderr.strip()[:500]}")
        lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        if len(lines) != x.shape[0]:
            raise RuntimeError(f"external model returned {len(lines)} values for {x.shape[0]} points")
        y = np.array([float(ln) for ln in lines])
        if not np.all(np.isfinite(y)):
            raise RuntimeError("external model returned non-finite values")
        return y


def external_benchmark(
    name: str, command: Sequence[str], input_model: InputModel, p: int, q: float = 1.0, n_max: int = 0
) -> BenchmarkModel:
    return BenchmarkModel(name, input_model, ExternalModel(command), p, q, n_max)

