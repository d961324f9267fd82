"""Command-line entry point: ``bench run | aggregate | plot``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .aggregate import aggregate_ranks
from .config import BenchConfig, ConfigError
from .outputs import emit_outputs, emit_plots, read_records, records_digest
from .runner import run

log = logging.getLogger("sparsepce.bench")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bench", description="Sparse PCE benchmark harness.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the benchmark grid")
    r.add_argument("--config", required=True, type=Path)
    r.add_argument("--out", type=Path, help="output directory (default: config 'out' or ./bench_out)")
    r.add_argument("--jobs", type=int)
    r.add_argument("--seed", type=int, help="override master_seed")
    r.add_argument("--mode", choices=("same-ed", "paired"), default="same-ed")
    r.add_argument("--no-plots", action="store_true")

    a = sub.add_parser("aggregate", help="rank/robustness tables from records.csv")
    a.add_argument("--in", dest="inp", required=True, type=Path)
    a.add_argument("--mode", choices=("same-ed", "paired"), default="same-ed")
    a.add_argument("--out", type=Path, help="write JSON here instead of stdout")
    a.add_argument("--seed", type=int, default=0, help="bootstrap seed for paired mode")

    p = sub.add_parser("plot", help="SVG figures from records.csv")
    p.add_argument("--in", dest="inp", required=True, type=Path)
    p.add_argument("--mode", choices=("same-ed", "paired"), default="same-ed")
    p.add_argument("--out", type=Path, help="figure directory (default: next to records.csv)")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            cfg = BenchConfig.load(args.config)
            if args.seed is not None:
                cfg = dataclasses.replace(cfg, master_seed=args.seed)
            out = args.out or Path(cfg.out or "bench_out")
            records = run(cfg, jobs=args.jobs)
            agg = aggregate_ranks(records, args.mode)
            paths = emit_outputs(records, agg, out, plots=not args.no_plots)
            (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2))
            n_err = agg["n_errors"]
            print(f"{len(records)} records ({n_err} errors) -> {out}")
            print(f"records digest (timing excluded): {records_digest(paths[0])}")
        elif args.command == "aggregate":
            agg = aggregate_ranks(read_records(args.inp), args.mode, seed=args.seed)
            text = json.dumps(agg, indent=2)
            if args.out:
                args.out.write_text(text)
            else:
                print(text)
        else:
            records = read_records(args.inp)
            agg = aggregate_ranks(records, args.mode)
            for p in emit_plots(records, agg, args.out or args.inp.parent):
                print(p)
    except (ConfigError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
