import json

import numpy as np
import pytest
import yaml

from sparsepce.bench import aggregate as agg
from sparsepce.bench.aggregate import aggregate_ranks, medians, small_sizes
from sparsepce.bench.cli import main
from sparsepce.bench.config import BenchConfig, ConfigError
from sparsepce.bench.outputs import boxplot_model, emit_outputs, read_records, records_digest, write_records
from sparsepce.bench.runner import RECORD_FIELDS, BenchRecord, derive_seed, run

TINY = {
    "master_seed": 5,
    "replications": 2,
    "n_val": 500,
    "samplers": ["lhs"],
    "solvers": ["omp", "sp_loo"],
    "models": [{"name": "ishigami", "preset": "small", "ed_sizes": [30, 40]}],
}


@pytest.fixture(scope="module")
def tiny_records():
    return run(BenchConfig.from_dict(TINY))


def rec(solver, err, model="m", sampler="s", N=10, rep=0, error=""):
    return BenchRecord(model, sampler, solver, N, rep, err, 3, 0.1, 1.0, 7, "abc", error)


# config

def test_config_validation(tmp_path):
    cfg = BenchConfig.from_dict(TINY)
    assert cfg.models[0].label == "ishigami:small"
    assert BenchConfig.from_dict(cfg.to_dict()) == cfg
    for bad in (
        {**TINY, "replications": 0},
        {**TINY, "solvers": ["ridge"]},
        {**TINY, "samplers": ["sobol"]},
        {**TINY, "models": [{"name": "ishigami", "ed_sizes": [40, 30]}]},
        {**TINY, "models": [{"name": "truss", "ed_sizes": [40]}]},
        {**TINY, "models": [{"name": "ishigami", "preset": "tiny", "ed_sizes": [40]}]},
        {"samplers": ["lhs"]},
    ):
        with pytest.raises(ConfigError):
            BenchConfig.from_dict(bad)
    p = tmp_path / "c.yaml"
    p.write_text(yaml.safe_dump(TINY))
    assert BenchConfig.load(p) == cfg
    assert BenchConfig.from_dict({k: v for k, v in TINY.items() if k != "n_val"}).n_val == 100_000


# run

def test_shared_ed(tiny_records):
    assert len(tiny_records) == 1 * 1 * 2 * 2 * 2
    cells = {}
    for r in tiny_records:
        cells.setdefault((r.model, r.sampler, r.N, r.replication), []).append(r)
    for key, rs in cells.items():
        assert [r.solver for r in rs] == ["omp", "sp_loo"]
        assert len({r.seed for r in rs}) == 1 and len({r.ed_checksum for r in rs}) == 1
        assert rs[0].seed == derive_seed(5, "ishigami:small", "lhs", key[2], key[3])
    assert all(r.ok and r.relmse >= 0 and r.n_active <= r.N for r in tiny_records)


def test_rerun_identical(tiny_records):
    again = run(BenchConfig.from_dict(TINY))
    assert [r.relmse for r in again] == [r.relmse for r in tiny_records]
    assert [r.ed_checksum for r in again] == [r.ed_checksum for r in tiny_records]


def test_parallel_matches_serial(tiny_records):
    par = run(BenchConfig.from_dict(TINY), jobs=2)
    assert [(r.solver, r.N, r.replication, r.relmse) for r in par] == [
        (r.solver, r.N, r.replication, r.relmse) for r in tiny_records
    ]


def test_failed_fit_recorded():
    cfg = BenchConfig.from_dict({**TINY, "solvers": ["sp"], "models": [{"name": "ishigami", "ed_sizes": [3]}],
                                 "replications": 1})
    (r,) = run(cfg)
    assert not r.ok and r.error and np.isnan(r.relmse)


def test_seed_derivation():
    assert derive_seed(0, "a", 1) == derive_seed(0, "a", 1)
    assert derive_seed(0, "a", 1) != derive_seed(1, "a", 1)
    assert 0 <= derive_seed(3, "x") < 2**64


# aggregation

def test_single_solver():
    t = aggregate_ranks([rec("a", 0.1, rep=i) for i in range(3)])["tables"]["all"]
    assert t["s/a"]["rank_pct"] == [100.0]
    assert t["s/a"]["within"]["2"] == 100.0


def test_factor_arithmetic():
    rs = []
    for i in range(4):
        rs += [rec("A", 1e-4, rep=i), rec("B", 3e-4, rep=i)]
    t = aggregate_ranks(rs)["tables"]["all"]
    assert t["s/B"]["within"]["2"] == 0.0
    assert t["s/B"]["within"]["5"] == 100.0
    assert t["s/A"]["rank_pct"] == [100.0, 0.0]
    assert t["s/B"]["rank_pct"] == [0.0, 100.0]


def test_ties_share_rank():
    rs = [rec("A", 0.5, rep=i) for i in range(3)] + [rec("B", 0.5, rep=i) for i in range(3)]
    t = aggregate_ranks(rs)["tables"]["all"]
    assert t["s/A"]["rank_pct"][0] == 100.0 and t["s/B"]["rank_pct"][0] == 100.0


def test_errors_rank_last():
    rs = [rec("A", np.nan, error="boom"), rec("B", 10.0)]
    t = aggregate_ranks(rs)["tables"]["all"]
    assert t["s/B"]["rank_pct"] == [100.0, 0.0]
    assert t["s/A"]["rank_pct"] == [0.0, 100.0]
    assert t["s/A"]["within"]["10"] == 0.0


def test_models_weighted_equally():
    rs = [rec("A", 1.0, model="m1", rep=i) for i in range(9)] + [rec("B", 2.0, model="m1", rep=i) for i in range(9)]
    rs += [rec("A", 2.0, model="m2"), rec("B", 1.0, model="m2")]
    t = aggregate_ranks(rs)["tables"]["all"]
    assert t["s/A"]["rank_pct"] == pytest.approx([50.0, 50.0])


def test_incomplete_cells_excluded(caplog):
    rs = [rec("A", 1.0, rep=0), rec("B", 2.0, rep=0), rec("A", 1.0, rep=1)]
    t = aggregate_ranks(rs)["tables"]["all"]
    assert t["s/A"]["n_cells"] == 1
    assert "incomplete" in caplog.text


def test_small_large_split():
    assert small_sizes([70, 100, 150, 200]) == {70, 100}
    assert small_sizes([10, 20, 30]) == {10, 20}
    rs = [rec("A", 1.0, N=n) for n in (10, 20, 30)]
    tables = aggregate_ranks(rs)["tables"]
    assert tables["small"]["s/A"]["n_cells"] == 2 and tables["large"]["s/A"]["n_cells"] == 1


def test_paired_mode():
    rs = []
    for i in range(5):
        rs += [rec("omp", 1e-3, sampler="lhs", rep=i), rec("omp", 1e-1, sampler="mc", rep=i)]
    out = aggregate_ranks(rs, mode="paired", seed=1)
    t = out["tables"]["all"]
    assert t["lhs/omp"]["rank_pct"] == [100.0, 0.0]
    assert t["lhs/omp"]["n_cells"] == 5 * agg.N_BOOTSTRAP
    with pytest.raises(ValueError):
        aggregate_ranks(rs, mode="other")


def test_rank_percentages_sum(tiny_records):
    for mode in ("same-ed", "paired"):
        for table in aggregate_ranks(tiny_records, mode)["tables"].values():
            for row in table.values():
                assert sum(row["rank_pct"]) == pytest.approx(100.0)


# outputs

def test_empty_csv(tmp_path):
    p = write_records([], tmp_path / "r.csv")
    assert p.read_text() == ",".join(RECORD_FIELDS) + "\n"
    assert read_records(p) == []


def test_csv_roundtrip(tmp_path, tiny_records):
    p = write_records(tiny_records, tmp_path / "r.csv")
    assert read_records(p) == tiny_records
    bad = tmp_path / "bad.csv"
    bad.write_text("model,N\nx,1\n")
    with pytest.raises(ValueError):
        read_records(bad)


def test_digest_ignores_timing(tmp_path, tiny_records):
    a = write_records(tiny_records, tmp_path / "a.csv")
    shifted = [BenchRecord(**{**r.__dict__, "wall_ms": r.wall_ms + 5}) for r in tiny_records]
    b = write_records(shifted, tmp_path / "b.csv")
    assert a.read_bytes() != b.read_bytes()
    assert records_digest(a) == records_digest(b)


def test_boxplot_medians(tmp_path, tiny_records):
    drawn = boxplot_model(tiny_records, "ishigami:small", tmp_path / "box.svg")
    table = {(f"{m['sampler']}/{m['solver']}", m["N"]): m["median_log10_relmse"] for m in medians(tiny_records)}
    assert drawn.keys() == table.keys()
    for k, v in table.items():
        assert drawn[k] == pytest.approx(v, abs=1e-12)
    assert (tmp_path / "box.svg").read_text().lstrip().startswith("<?xml")


def test_emit_outputs(tmp_path, tiny_records):
    a = aggregate_ranks(tiny_records)
    paths = emit_outputs(tiny_records, a, tmp_path / "out")
    names = {p.name for p in paths}
    assert {"records.csv", "aggregates.json", "boxplot_ishigami_small.svg", "ranks_same-ed_all.svg"} <= names
    assert json.loads((tmp_path / "out" / "aggregates.json").read_text())["n_records"] == len(tiny_records)


# CLI

def test_cli_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(yaml.safe_dump({**TINY, "replications": 1, "models": [{"name": "ishigami", "preset": "small",
                                                                          "ed_sizes": [30]}]}))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert "records digest" in capsys.readouterr().out
    assert (out / "records.csv").exists() and (out / "config.json").exists()
    assert main(["aggregate", "--in", str(out / "records.csv"), "--mode", "paired"]) == 0
    assert json.loads(capsys.readouterr().out)["mode"] == "paired"
    assert main(["plot", "--in", str(out / "records.csv"), "--out", str(tmp_path / "figs")]) == 0
    assert any(p.suffix == ".svg" for p in (tmp_path / "figs").iterdir())


def test_cli_errors(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("- 1\n- 2\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
