"""records.csv, aggregates.json and SVG figures."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .aggregate import FACTORS  # noqa: E402
from .runner import RECORD_FIELDS, BenchRecord  # noqa: E402

_INT_FIELDS = {"N", "replication", "n_active", "seed"}
_FLOAT_FIELDS = {"relmse", "cv_error", "wall_ms"}

GOLDEN = (math.sqrt(5) - 1.0) / 2.0
STYLE = {
    "font.family": "serif",
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1,
    "svg.hashsalt": "sparsepce",
}
RANK_COLORS = ["#08589e", "#2b8cbe", "#4eb3d3", "#7bccc4", "#a8ddb5", "#ccebc5", "#e0f3db", "#f7fcf0"]
FACTOR_COLORS = ["#67000d", "#cb181d", "#fb6a4a"]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(records, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    return path


def read_records(path) -> list[BenchRecord]:
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"records file lacks columns {sorted(missing)}")
        for row in reader:
            kw = {}
            for f in RECORD_FIELDS:
                v = row[f]
                kw[f] = int(v) if f in _INT_FIELDS else float(v) if f in _FLOAT_FIELDS else v
            out.append(BenchRecord(**kw))
    return out


def records_digest(path) -> str:
    """SHA-256 of records.csv with the timing column removed."""
    h = hashlib.sha256()
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if row and row[0] == RECORD_FIELDS[0]:
                drop = row.index("wall_ms")
            h.update(("\x1f".join(c for i, c in enumerate(row) if i != drop) + "\n").encode())
    return h.hexdigest()


def _box_data(records, model):
    data = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.model == model and r.ok and np.isfinite(r.relmse) and r.relmse > 0:
            data[f"{r.sampler}/{r.solver}"][r.N].append(math.log10(r.relmse))
    return data


def boxplot_model(records, model, path):
    """Boxplots of log10 RelMSE against N, one box per combination at each N.

    Returns ``{(label, N): median}`` read back from the drawn median lines.
    """
    data = _box_data(records, model)
    labels = sorted(data)
    sizes = sorted({n for lab in labels for n in data[lab]})
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 6.0 * GOLDEN))
        width = 0.8 / max(len(labels), 1)
        medians = {}
        for k, lab in enumerate(labels):
            pos = [i + (k - (len(labels) - 1) / 2) * width for i, n in enumerate(sizes) if data[lab].get(n)]
            vals = [data[lab][n] for n in sizes if data[lab].get(n)]
            ns = [n for n in sizes if data[lab].get(n)]
            if not vals:
                continue
            color = plt.cm.tab10(k % 10)
            bp = ax.boxplot(
                vals, positions=pos, widths=0.9 * width, patch_artist=True, manage_ticks=False,
                boxprops={"facecolor": color, "alpha": 0.6}, medianprops={"color": "k"},
                flierprops={"markersize": 2},
            )
            for n, line in zip(ns, bp["medians"]):
                medians[(lab, n)] = float(line.get_ydata()[0])
            ax.plot([], [], "s", color=color, label=lab)
        ax.set_xticks(range(len(sizes)))
        ax.set_xticklabels([str(n) for n in sizes])
        ax.set_xlabel("experimental design size N")
        ax.set_ylabel("log10 relative MSE")
        ax.set_title(model)
        if labels:
            ax.legend(loc="upper right", frameon=False)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return medians


def rank_chart(table: dict, path, title: str = ""):
    """Stacked bars of rank percentages with triangles for the robustness factors."""
    labels = sorted(table, key=lambda lab: [-v for v in table[lab]["rank_pct"]])
    n_ranks = max((len(table[lab]["rank_pct"]) for lab in labels), default=0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.6 * len(labels) + 1.5), 3.4))
        x = np.arange(len(labels))
        bottom = np.zeros(len(labels))
        for r in range(n_ranks):
            h = np.array([table[lab]["rank_pct"][r] if r < len(table[lab]["rank_pct"]) else 0.0 for lab in labels])
            ax.bar(x, h, bottom=bottom, color=RANK_COLORS[r % len(RANK_COLORS)], width=0.7,
                   edgecolor="white", linewidth=0.3, label=f"rank {r + 1}")
            bottom += h
        for f, c in zip(FACTORS, FACTOR_COLORS):
            ax.plot(x, [table[lab]["within"][str(f)] for lab in labels], "v", color=c, markersize=5,
                    label=f"within {f}x")
        ax.set_xticks(x)
        ax.set_xticklabels(labels, rotation=45, ha="right")
        ax.set_ylim(0, 105)
        ax.set_ylabel("% of runs")
        if title:
            ax.set_title(title)
        ax.legend(loc="center left", bbox_to_anchor=(1.0, 0.5), frameon=False)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def emit_plots(records, aggregates: dict, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for model in sorted({r.model for r in records}):
        p = outdir / f"boxplot_{model.replace(':', '_')}.svg"
        boxplot_model(records, model, p)
        paths.append(p)
    for name, table in aggregates["tables"].items():
        if not table:
            continue
        p = outdir / f"ranks_{aggregates['mode']}_{name}.svg"
        rank_chart(table, p, f"{aggregates['mode']}, {name} ED sizes")
        paths.append(p)
    return paths


def emit_outputs(records, aggregates: dict, outdir, plots: bool = True) -> list[Path]:
    """Write records.csv, aggregates.json and (optionally) the SVG figures."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [write_records(records, outdir / "records.csv")]
    p = outdir / "aggregates.json"
    p.write_text(json.dumps(aggregates, indent=2, allow_nan=True))
    paths.append(p)
    if plots and records:
        paths += emit_plots(records, aggregates, outdir)
    return paths
