"""Experimental designs: samplers, candidate-set selection and matrix criteria."""

from __future__ import annotations

import numpy as np

from ..basis import MultiIndexSet, assemble
from ..inputs import InputModel
from .core import Design, read_design, write_design
from .criteria import avg_cross_correlation, d_value, mutual_coherence, normalized_gram, s_value
from .optimal import (
    CandidatePool,
    build_candidate_pool,
    d_optimal_indices,
    d_optimal_rrqr,
    near_optimal_greedy,
    near_optimal_indices,
)
from .sampling import (
    asymptotic_design,
    asymptotic_radius,
    coherence_optimal_design,
    cohopt_radius,
    lhs_maximin,
    mc_design,
    rejection_bound,
    uniform_ball,
)

BASE_SAMPLERS = ("mc", "lhs", "asymptotic", "coherence_optimal")
SUBSET_SAMPLERS = ("d_optimal", "near_optimal")
SAMPLERS = BASE_SAMPLERS + SUBSET_SAMPLERS


def make_design(sampler: str, input_model: InputModel, indexset: MultiIndexSet, n: int, rng) -> Design:
    """Draw ``n`` points with one of the base samplers."""
    if sampler == "mc":
        return mc_design(input_model, n, rng)
    if sampler == "lhs":
        return lhs_maximin(input_model, n, rng)
    if sampler == "asymptotic":
        return asymptotic_design(input_model, int(indexset.total_degrees().max()), n, rng)
    if sampler == "coherence_optimal":
        return coherence_optimal_design(input_model, indexset, n, rng)
    raise ValueError(f"unknown base sampler {sampler!r}; choose from {BASE_SAMPLERS}")


def select_from_pool(
    sampler: str,
    pool: CandidatePool,
    families,
    indexset: MultiIndexSet,
    n: int,
    rng: np.random.Generator,
) -> Design:
    """Draw an ``M``-candidate set from ``pool`` and pick ``n`` points by ``sampler``."""
    cand, _ = pool.draw_m(rng)
    psi = assemble(families, indexset, cand.points_standard)
    if sampler == "d_optimal":
        return d_optimal_rrqr(cand, psi, n)
    if sampler == "near_optimal":
        return near_optimal_greedy(cand, psi, n, rng)
    raise ValueError(f"unknown subset sampler {sampler!r}; choose from {SUBSET_SAMPLERS}")


__all__ = [
    "Design", "read_design", "write_design", "avg_cross_correlation", "d_value", "mutual_coherence",
    "normalized_gram", "s_value", "CandidatePool", "build_candidate_pool", "d_optimal_indices",
    "d_optimal_rrqr", "near_optimal_greedy", "near_optimal_indices", "asymptotic_design",
    "asymptotic_radius", "coherence_optimal_design", "cohopt_radius", "lhs_maximin", "mc_design",
    "rejection_bound", "uniform_ball", "make_design", "select_from_pool", "SAMPLERS",
    "BASE_SAMPLERS", "SUBSET_SAMPLERS",
]
