"""Grid execution with shared experimental designs."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from ..design import SUBSET_SAMPLERS, build_candidate_pool, make_design, select_from_pool
from ..models import get_model
from ..pce import fit_pce
from ..selection import relmse
from .config import BenchConfig, ModelEntry

log = logging.getLogger(__name__)

POOL_BASE = "coherence_optimal"


@dataclass
class BenchRecord:
    model: str
    sampler: str
    solver: str
    N: int
    replication: int
    relmse: float
    n_active: int
    cv_error: float
    wall_ms: float
    seed: int
    ed_checksum: str = ""
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


RECORD_FIELDS = tuple(f.name for f in fields(BenchRecord))


def derive_seed(master_seed: int, *parts) -> int:
    """64-bit seed from a SHA-256 hash of the master seed and the cell key."""
    key = "|".join(str(p) for p in (master_seed, *parts))
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def ed_seed(master_seed: int, model: str, sampler: str, N: int, replication: int) -> int:
    return derive_seed(master_seed, model, sampler, N, replication)


class _ModelContext:
    """Basis, validation sets and candidate pool of one model, built lazily."""

    def __init__(self, entry: ModelEntry, config: BenchConfig):
        self.entry = entry
        self.model = get_model(entry.name)
        self.indexset = self.model.basis(entry.preset)
        self.families = self.model.input.polynomials
        self.config = config
        self._val = {}
        self._pool = None

    def validation(self, rep: int):
        if rep not in self._val:
            rng = np.random.default_rng(derive_seed(self.config.master_seed, self.entry.label, "validation", rep))
            x = self.model.input.sample_iid(self.config.n_val, rng)
            self._val[rep] = (x, self.model(x))
        return self._val[rep]

    def pool(self):
        if self._pool is None:
            rng = np.random.default_rng(derive_seed(self.config.master_seed, self.entry.label, "pool", POOL_BASE))
            self._pool = build_candidate_pool(POOL_BASE, self.model.input, self.indexset, rng)
        return self._pool

    def design(self, sampler: str, N: int, rng):
        if sampler in SUBSET_SAMPLERS:
            return select_from_pool(sampler, self.pool(), self.families, self.indexset, N, rng)
        return make_design(sampler, self.model.input, self.indexset, N, rng)


def _run_cell(ctx: _ModelContext, sampler: str, N: int, rep: int) -> list[BenchRecord]:
    cfg = ctx.config
    label = ctx.entry.label
    seed = ed_seed(cfg.master_seed, label, sampler, N, rep)
    base = dict(model=label, sampler=sampler, N=N, replication=rep, seed=seed)
    try:
        design = ctx.design(sampler, N, np.random.default_rng(seed))
        y = ctx.model(design.points_physical)
    except Exception as exc:  # noqa: BLE001 -- recorded, run continues
        log.warning("design failed for %s/%s N=%d rep=%d: %s", label, sampler, N, rep, exc)
        return [
            BenchRecord(solver=s, relmse=float("nan"), n_active=0, cv_error=float("nan"), wall_ms=0.0,
                        error=f"design: {type(exc).__name__}: {exc}", **base)
            for s in cfg.solvers
        ]
    checksum = design.checksum()
    x_val, y_val = ctx.validation(rep)
    out = []
    for solver in cfg.solvers:
        t0 = time.perf_counter()
        try:
            sur = fit_pce(ctx.model.input, ctx.indexset, design, y, solver)
            err = relmse(y_val, sur(x_val))
            rec = BenchRecord(
                solver=solver, relmse=err, n_active=sur.solution.n_active,
                cv_error=float(sur.solution.cv_error), wall_ms=1e3 * (time.perf_counter() - t0),
                ed_checksum=checksum, **base,
            )
        except Exception as exc:  # noqa: BLE001
            log.warning("solver %s failed on %s/%s N=%d rep=%d: %s", solver, label, sampler, N, rep, exc)
            rec = BenchRecord(
                solver=solver, relmse=float("nan"), n_active=0, cv_error=float("nan"),
                wall_ms=1e3 * (time.perf_counter() - t0), ed_checksum=checksum,
                error=f"{type(exc).__name__}: {exc}", **base,
            )
        out.append(rec)
    return out


def _cells(config: BenchConfig):
    for mi, entry in enumerate(config.models):
        for sampler in config.samplers:
            for N in entry.ed_sizes:
                for rep in range(config.replications):
                    yield mi, sampler, N, rep


_WORKER_CTX: dict = {}


def _worker(args):
    config, mi, sampler, N, rep = args
    # the config arrives re-pickled with every task; key the cache on its content
    key = (json.dumps(config.to_dict(), sort_keys=True), mi)
    if key not in _WORKER_CTX:
        if len(_WORKER_CTX) > 8:
            _WORKER_CTX.clear()
        _WORKER_CTX[key] = _ModelContext(config.models[mi], config)
    return _run_cell(_WORKER_CTX[key], sampler, N, rep)


def run(config: BenchConfig, jobs: int | None = None) -> list[BenchRecord]:
    """One record per (model, sampler, N, replication, solver), in grid order."""
    jobs = config.jobs if jobs is None else jobs
    cells = list(_cells(config))
    if jobs <= 1:
        ctxs = [_ModelContext(e, config) for e in config.models]
        results = [_run_cell(ctxs[mi], s, N, rep) for mi, s, N, rep in cells]
    else:
        # map keeps submission order, so output order does not depend on scheduling
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_worker, [(config, *c) for c in cells], chunksize=1))
    return [r for cell in results for r in cell]
