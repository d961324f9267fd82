"""The ``Design`` container shared by all samplers, plus CSV/JSON export."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..inputs import InputModel


@dataclass
class Design:
    """Experimental design in physical and standardized coordinates.

    ``weights`` is ``None`` for unweighted samplers. Weighted samplers store
    the raw ``1 / G(u)`` values; the common scale cancels in least squares.
    """

    points_physical: np.ndarray
    points_standard: np.ndarray
    weights: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points_physical = np.atleast_2d(np.asarray(self.points_physical, dtype=float))
        self.points_standard = np.atleast_2d(np.asarray(self.points_standard, dtype=float))
        if self.points_physical.shape != self.points_standard.shape:
            raise ValueError("physical and standard points must have the same shape")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).ravel()
            if self.weights.size != self.n:
                raise ValueError("one weight per point required")
            if np.any(~(self.weights > 0)):
                raise ValueError("weights must be strictly positive")

    @property
    def n(self) -> int:
        return self.points_physical.shape[0]

    @property
    def d(self) -> int:
        return self.points_physical.shape[1]

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def take(self, idx, **extra) -> "Design":
        """Subset of rows; weights are inherited unchanged."""
        idx = np.asarray(idx, dtype=int)
        prov = {**self.provenance, **extra, "parent": self.provenance.get("sampler")}
        return Design(
            self.points_physical[idx],
            self.points_standard[idx],
            None if self.weights is None else self.weights[idx],
            prov,
        )

    @classmethod
    def from_standard(cls, input_model: InputModel, u, weights=None, **provenance) -> "Design":
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return cls(input_model.from_standard(u), u, weights, provenance)

    @classmethod
    def from_physical(cls, input_model: InputModel, x, weights=None, **provenance) -> "Design":
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return cls(x, input_model.to_standard(x), weights, provenance)

    def checksum(self) -> str:
        h = hashlib.sha256(np.ascontiguousarray(self.points_physical).tobytes())
        if self.weights is not None:
            h.update(np.ascontiguousarray(self.weights).tobytes())
        return h.hexdigest()[:16]


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def write_design(design: Design, path) -> tuple[Path, Path]:
    """Write ``dim_0..dim_{d-1},weight`` CSV and a ``.json`` provenance sidecar."""
    path = Path(path)
    w = design.weights if design.weighted else np.ones(design.n)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow([f"dim_{k}" for k in range(design.d)] + ["weight"])
        for row, wi in zip(design.points_physical, w):
            out.writerow([repr(float(v)) for v in row] + [repr(float(wi))])
    side = path.with_suffix(path.suffix + ".json")
    side.write_text(json.dumps({"weighted": design.weighted, "provenance": _jsonable(design.provenance)}, indent=2))
    return path, side


def read_design(path, input_model: InputModel) -> Design:
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    side = path.with_suffix(path.suffix + ".json")
    meta = json.loads(side.read_text()) if side.exists() else {"weighted": True, "provenance": {}}
    weights = data[:, -1] if meta["weighted"] else None
    return Design.from_physical(input_model, data[:, :-1], weights, **meta["provenance"])
