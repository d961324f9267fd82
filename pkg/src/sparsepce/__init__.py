"""Sparse polynomial chaos expansions: bases, designs, sparse solvers and a benchmark harness."""

# solvers must load before selection (selection reuses solver base types)
from . import basis, inputs, solvers  # noqa: I001
from . import selection, design, models, pce
from .basis import MultiIndexSet, TruncationSpec, assemble, enumerate_truncation
from .design import Design
from .inputs import Gaussian, InputModel, Lognormal, Marginal, Uniform
from .models import BenchmarkModel, registry
from .pce import PCESurrogate, fit_pce
from .selection import CvSpec, loo_ols, modified_loo, relmse
from .solvers import RegressionProblem, SparseSolution, solve_with_hyperparameters

__version__ = "0.1.0"

__all__ = [
    "basis", "inputs", "solvers", "selection", "design", "models", "pce",
    "MultiIndexSet", "TruncationSpec", "assemble", "enumerate_truncation", "Design",
    "Gaussian", "InputModel", "Lognormal", "Marginal", "Uniform", "BenchmarkModel", "registry",
    "PCESurrogate", "fit_pce", "CvSpec", "loo_ols", "modified_loo", "relmse",
    "RegressionProblem", "SparseSolution", "solve_with_hyperparameters",
]
