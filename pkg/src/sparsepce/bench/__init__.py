"""Benchmark harness: shared-design grid runs, rank aggregation and figures."""

from .aggregate import FACTORS, aggregate_ranks, medians, small_sizes
from .config import BenchConfig, ConfigError, ModelEntry
from .outputs import emit_outputs, emit_plots, read_records, records_digest, write_records
from .runner import RECORD_FIELDS, BenchRecord, derive_seed, ed_seed, run

__all__ = [
    "FACTORS", "aggregate_ranks", "medians", "small_sizes", "BenchConfig", "ConfigError", "ModelEntry",
    "emit_outputs", "emit_plots", "read_records", "records_digest", "write_records", "RECORD_FIELDS",
    "BenchRecord", "derive_seed", "ed_seed", "run",
]
