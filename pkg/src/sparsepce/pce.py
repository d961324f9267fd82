"""Fitting a sparse PCE on a design and evaluating the resulting surrogate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import MultiIndexSet, assemble
from .design import Design
from .inputs import InputModel
from .selection import CvSpec
from .solvers import RegressionProblem, SparseSolution, solve_with_hyperparameters


@dataclass
class PCESurrogate:
    input: InputModel
    indexset: MultiIndexSet
    solution: SparseSolution

    def __post_init__(self):
        act = np.asarray(self.solution.active_set, dtype=int)
        self._active = self.indexset.subset(act) if act.size else None
        self._coef = self.solution.coefficients[act]

    def predict(self, x, chunk: int = 20_000) -> np.ndarray:
        """Evaluate on physical points, assembling only the active columns."""
        u = self.input.to_standard(x)
        out = np.zeros(u.shape[0])
        if self._active is None:
            return out
        fams = self.input.polynomials
        for s in range(0, u.shape[0], chunk):
            out[s:s + chunk] = assemble(fams, self._active, u[s:s + chunk]) @ self._coef
        return out

    __call__ = predict


def regression_problem(design: Design, indexset: MultiIndexSet, families, y) -> RegressionProblem:
    psi = assemble(families, indexset, design.points_standard)
    return RegressionProblem(psi, np.asarray(y, dtype=float), design.weights)


def fit_pce(
    input_model: InputModel,
    indexset: MultiIndexSet,
    design: Design,
    y,
    solver: str = "omp",
    selection: CvSpec | None = None,
) -> PCESurrogate:
    problem = regression_problem(design, indexset, input_model.polynomials, y)
    sol = solve_with_hyperparameters(solver, problem, selection)
    return PCESurrogate(input_model, indexset, sol)
