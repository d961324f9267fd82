"""Rank and robustness tables over benchmark records.

``same-ed``: combinations competing on one experimental design (all solvers
for a fixed model, sampler, N and replication). ``paired``: every
(sampler, solver) combination competes; designs differ between samplers, so
replications are matched at random and the matching is bootstrapped.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict

import numpy as np
from scipy.stats import rankdata

from .runner import BenchRecord

log = logging.getLogger(__name__)

FACTORS = (2, 5, 10)
N_BOOTSTRAP = 4


def _err(rec: BenchRecord) -> float:
    # failed fits rank last in their cell
    if rec.error or not np.isfinite(rec.relmse):
        return math.inf
    return rec.relmse


def small_sizes(sizes) -> set:
    """First ceil(half) of the sorted distinct sizes."""
    s = sorted(set(sizes))
    return set(s[: math.ceil(len(s) / 2)])


def _cells_same_ed(records):
    cells = defaultdict(dict)
    for r in records:
        cells[(r.model, r.sampler, r.N, r.replication)][f"{r.sampler}/{r.solver}"] = _err(r)
    return [(key[0], key[2], entries) for key, entries in cells.items()]


def _cells_paired(records, seed):
    groups = defaultdict(lambda: defaultdict(list))
    for r in sorted(records, key=lambda r: (r.model, r.N, r.sampler, r.solver, r.replication)):
        groups[(r.model, r.N)][f"{r.sampler}/{r.solver}"].append(_err(r))
    rng = np.random.default_rng(seed)
    out = []
    for (model, N), combos in groups.items():
        n_rep = min(len(v) for v in combos.values())
        if any(len(v) != n_rep for v in combos.values()):
            log.warning("paired ranking: unequal replication counts for %s N=%d; truncating to %d", model, N, n_rep)
        for _ in range(N_BOOTSTRAP):
            perm = {lab: rng.permutation(len(v))[:n_rep] for lab, v in combos.items()}
            for i in range(n_rep):
                out.append((model, N, {lab: combos[lab][perm[lab][i]] for lab in combos}))
    return out


def _complete(cells):
    """Drop cells missing a combination that other cells of the same group have."""
    expected = defaultdict(set)
    for model, N, entries in cells:
        sampler_key = frozenset(lab.split("/")[0] for lab in entries)
        expected[(model, sampler_key)] |= set(entries)
    keep = []
    dropped = 0
    for model, N, entries in cells:
        sampler_key = frozenset(lab.split("/")[0] for lab in entries)
        if set(entries) == expected[(model, sampler_key)]:
            keep.append((model, N, entries))
        else:
            dropped += 1
    if dropped:
        log.warning("excluded %d incomplete cells from ranking", dropped)
    return keep


def _table(cells):
    labels = sorted({lab for _, _, e in cells for lab in e})
    n_labels = max((len(e) for _, _, e in cells), default=0)
    per_model = defaultdict(int)
    for model, _, _ in cells:
        per_model[model] += 1
    rank_w = {lab: np.zeros(n_labels) for lab in labels}
    within = {lab: np.zeros(len(FACTORS)) for lab in labels}
    total = defaultdict(float)
    for model, _, entries in cells:
        w = 1.0 / per_model[model]  # each model contributes equally
        labs = list(entries)
        errs = np.array([entries[lab] for lab in labs])
        ranks = rankdata(errs, method="min").astype(int)
        best = errs.min()
        for lab, e, rk in zip(labs, errs, ranks):
            rank_w[lab][rk - 1] += w
            total[lab] += w
            if np.isfinite(e):
                within[lab] += w * np.array([e <= f * best for f in FACTORS], dtype=float)
    out = {}
    for lab in labels:
        t = total[lab]
        out[lab] = {
            "rank_pct": (100.0 * rank_w[lab] / t).tolist() if t else [],
            "within": {str(f): (100.0 * within[lab][i] / t if t else 0.0) for i, f in enumerate(FACTORS)},
            "n_cells": int(sum(1 for _, _, e in cells if lab in e)),
        }
    return out


def medians(records) -> list[dict]:
    """Median log10 RelMSE per (model, sampler, solver, N) over successful runs."""
    groups = defaultdict(list)
    for r in records:
        if r.ok and np.isfinite(r.relmse) and r.relmse > 0:
            groups[(r.model, r.sampler, r.solver, r.N)].append(np.log10(r.relmse))
    return [
        {"model": k[0], "sampler": k[1], "solver": k[2], "N": k[3],
         "median_log10_relmse": float(np.median(v)), "n": len(v)}
        for k, v in sorted(groups.items())
    ]


def aggregate_ranks(records, mode: str = "same-ed", seed: int = 0) -> dict:
    """Rank-percentage and robustness tables for all, small and large ED sizes."""
    records = list(records)
    if mode == "same-ed":
        cells = _cells_same_ed(records)
    elif mode == "paired":
        cells = _cells_paired(records, seed)
    else:
        raise ValueError("mode must be 'same-ed' or 'paired'")
    cells = _complete(cells)
    sizes = defaultdict(set)
    for model, N, _ in cells:
        sizes[model].add(N)
    small = {m: small_sizes(s) for m, s in sizes.items()}
    split = {
        "all": cells,
        "small": [c for c in cells if c[1] in small[c[0]]],
        "large": [c for c in cells if c[1] not in small[c[0]]],
    }
    return {
        "mode": mode,
        "factors": list(FACTORS),
        "tables": {name: _table(cs) for name, cs in split.items()},
        "medians": medians(records),
        "n_records": len(records),
        "n_errors": sum(1 for r in records if not r.ok),
    }
