from .base import (
    IncrementalQR,
    RegressionProblem,
    SingularMatrixError,
    SparseSolution,
    lstsq_subset,
    ols,
)
from .bcs import bcs_fastlaplace
from .lars import lars
from .omp import omp
from .sp import ParameterError, k_grid, sp_sweep, subspace_pursuit
from .spgl1 import bpdn_spg, lasso_spg, pareto_curve, project_l1
from .hyper import RELMSE_GRID, SOLVERS, hyperparameter_grid, solve_with_hyperparameters

__all__ = [
    "IncrementalQR", "RegressionProblem", "SingularMatrixError", "SparseSolution",
    "lstsq_subset", "ols", "bcs_fastlaplace", "lars", "omp", "ParameterError", "k_grid",
    "sp_sweep", "subspace_pursuit", "bpdn_spg", "lasso_spg", "pareto_curve", "project_l1",
    "RELMSE_GRID", "SOLVERS", "hyperparameter_grid", "solve_with_hyperparameters",
]
