"""Benchmark configuration: YAML or JSON, validated on load.

Schema::

    master_seed: 0
    replications: 10
    n_val: 10000
    jobs: 1
    samplers: [lhs, coherence_optimal, d_optimal]
    solvers: [omp, sp_loo]
    models:
      - name: ishigami
        preset: default        # or "small"
        ed_sizes: [70, 100, 150, 200]
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from ..design import SAMPLERS
from ..models import registry
from ..solvers import SOLVERS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelEntry:
    name: str
    ed_sizes: tuple[int, ...]
    preset: str = "default"

    @property
    def label(self) -> str:
        return self.name if self.preset == "default" else f"{self.name}:{self.preset}"


@dataclass(frozen=True)
class BenchConfig:
    models: tuple[ModelEntry, ...]
    samplers: tuple[str, ...]
    solvers: tuple[str, ...]
    replications: int = 10
    master_seed: int = 0
    n_val: int = 100_000
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.n_val < 2:
            raise ConfigError("n_val must be >= 2")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.models or not self.samplers or not self.solvers:
            raise ConfigError("models, samplers and solvers must all be non-empty")
        known = registry()
        for m in self.models:
            if m.name not in known:
                raise ConfigError(f"unknown model {m.name!r}; known: {sorted(known)}")
            if m.preset != "default" and m.preset not in known[m.name].presets:
                raise ConfigError(f"model {m.name!r} has no preset {m.preset!r}")
            sizes = list(m.ed_sizes)
            if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 2:
                raise ConfigError(f"ed_sizes for {m.name!r} must be strictly increasing integers >= 2")
        for s in self.samplers:
            if s not in SAMPLERS:
                raise ConfigError(f"unknown sampler {s!r}; known: {SAMPLERS}")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ConfigError(f"unknown solver {s!r}; known: {SOLVERS}")
        if len(set(self.solvers)) != len(self.solvers) or len(set(self.samplers)) != len(self.samplers):
            raise ConfigError("duplicate sampler or solver names")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        try:
            models = tuple(
                ModelEntry(m["name"], tuple(int(n) for n in m["ed_sizes"]), m.get("preset", "default"))
                for m in d["models"]
            )
            return cls(
                models=models,
                samplers=tuple(d["samplers"]),
                solvers=tuple(d["solvers"]),
                replications=int(d.get("replications", 10)),
                master_seed=int(d.get("master_seed", 0)),
                n_val=int(d.get("n_val", 100_000)),
                out=d.get("out"),
                jobs=int(d.get("jobs", 1)),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "BenchConfig":
        text = Path(path).read_text()
        data = yaml.safe_load(text)  # JSON is valid YAML
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "replications": self.replications,
            "n_val": self.n_val,
            "jobs": self.jobs,
            "samplers": list(self.samplers),
            "solvers": list(self.solvers),
            "models": [
                {"name": m.name, "preset": m.preset, "ed_sizes": list(m.ed_sizes)} for m in self.models
            ],
        }
