import csv
from pathlib import Path

import numpy as np
import pytest

from anobench.bench import (
    AlgorithmSpec,
    BenchmarkConfig,
    ResultsTable,
    build_settings,
    config_from_mapping,
    emit_results,
    load_config,
    load_csv,
    prep_dataset,
    read_cliques,
    read_results,
    render_cd,
    run_grid,
    write_dataset_csv,
)
from anobench.bench.cli import main
from anobench.bench.grid import SUMMARY_HEADER
from anobench.bench.io import RESULTS_HEADER
from anobench.errors import (
    AnomalyRatioTooHigh,
    ConfigError,
    LabelDomain,
    MissingLabelColumn,
    ParseError,
    UnknownParameter,
)
from anobench.evaluation import MetricRecord, cd_analysis, rank_matrix

from conftest import scattered


def write(path, text):
    Path(path).write_text(text, encoding="utf-8")
    return path


def dataset_file(path, n=300, seed=0, frac=0.05):
    X, y = scattered(n=n, d=3, anomaly_frac=frac, seed=seed)
    write_dataset_csv(path, X, y)
    return path


def fast_config(tmp_path, **kw):
    files = [dataset_file(tmp_path / f"ds{i}.csv", seed=i) for i in range(2)]
    data = {"datasets": [str(f) for f in files], "algorithms": ["knn", "hbos", "ecod"],
            "n_repeats": 3, "record_timings": False}
    data.update(kw)
    return config_from_mapping(data)


# CSV ingestion

def test_load_csv_basic(tmp_path):
    p = write(tmp_path / "a.csv", "f0,f1,label\n1,2,0\n3,4,1\n5,6.5,0\n")
    X, y, names = load_csv(p)
    assert X.tolist() == [[1, 2], [3, 4], [5, 6.5]] and y.tolist() == [0, 1, 0] and names == ["f0", "f1"]


def test_load_csv_errors(tmp_path):
    with pytest.raises(MissingLabelColumn):
        load_csv(write(tmp_path / "b.csv", "f0,f1\n1,2\n"))
    with pytest.raises(ParseError, match=r"line 3, column 2"):
        load_csv(write(tmp_path / "c.csv", "f0,f1,label\n1,2,0\n1,abc,1\n"))
    with pytest.raises(LabelDomain):
        load_csv(write(tmp_path / "d.csv", "f0,label\n1,2\n"))
    with pytest.raises(ParseError):
        load_csv(write(tmp_path / "e.csv", ""))
    with pytest.raises(ParseError):
        load_csv(write(tmp_path / "f.csv", "f0,label\n1,0,3\n"))


def test_dataset_csv_round_trip(tmp_path):
    r = np.random.default_rng(0)
    X = r.normal(size=(20, 3)) * 1e-7 + np.pi
    y = r.integers(0, 2, 20)
    write_dataset_csv(tmp_path / "rt.csv", X, y, ["a", "b", "c"])
    X2, y2, names = load_csv(tmp_path / "rt.csv")
    assert np.array_equal(X, X2) and np.array_equal(y, y2) and names == ["a", "b", "c"]


# prep

def test_prep_identity_band():
    X, y = scattered(n=5000, anomaly_frac=0.05)
    X2, y2 = prep_dataset(X, y, seed=0)
    assert np.array_equal(X, X2) and np.array_equal(y, y2)


def test_prep_upsample():
    X, y = scattered(n=500, anomaly_frac=0.10)
    X2, y2 = prep_dataset(X, y, seed=0)
    assert len(y2) == 1000 and y2.sum() == 100
    assert {tuple(r) for r in X} <= {tuple(r) for r in X2}


def test_prep_downsample():
    X, y = scattered(n=12000, d=2, anomaly_frac=0.05)
    X2, y2 = prep_dataset(X, y, seed=1)
    assert len(y2) == 10000 and y2.sum() == 500
    assert len({tuple(r) for r in X2}) == 10000


def test_prep_ratio_rejected():
    y = np.r_[np.zeros(55, int), np.ones(45, int)]
    with pytest.raises(AnomalyRatioTooHigh):
        prep_dataset(np.random.default_rng(0).normal(size=(100, 2)), y)


# config

def test_config_yaml(tmp_path):
    dataset_file(tmp_path / "x.csv")
    p = write(tmp_path / "c.yaml", "datasets: [x.csv]\nalgorithms: [knn, {name: iforest, params: {n_trees: 10}}]\n"
                                    "supervision: [0.1]\n")
    cfg = load_config(p)
    assert cfg.n_repeats == 3 and cfg.train_frac == 0.7
    assert cfg.algorithms[1] == AlgorithmSpec("iforest", (("n_trees", 10),))
    assert cfg.dataset_paths() == [tmp_path / "x.csv"]


@pytest.mark.parametrize("bad", [
    {"datasets": ["a"], "algorithms": ["knn"], "n_repeat": 3},
    {"datasets": ["a"], "algorithms": ["knn"], "supervision": [0.2]},
    {"datasets": ["a"], "algorithms": ["knn"], "duplication": [7]},
    {"datasets": ["a"], "algorithms": ["knn"], "noise_ratios": [0.6]},
    {"datasets": ["a"], "algorithms": ["knn"], "flip_ratios": [-0.1]},
    {"datasets": ["a"], "algorithms": ["knn"], "n_repeats": 0},
    {"datasets": ["a"], "algorithms": ["knn"], "anomaly_types": ["odd"]},
    {"datasets": ["a"], "algorithms": ["nope"]},
    {"datasets": ["a"], "algorithms": [{"name": "knn", "params": {"kk": 2}}]},
    {"datasets": [], "algorithms": ["knn"]},
])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        config_from_mapping(bad)


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("ADBENCH_THREADS", "3")
    assert config_from_mapping({"datasets": ["a"], "algorithms": ["knn"]}).threads == 3
    assert config_from_mapping({"datasets": ["a"], "algorithms": ["knn"], "threads": 2}).threads == 2


def test_unknown_parameter_is_config_error():
    assert issubclass(UnknownParameter, ConfigError)


# grid

def test_settings_ids(tmp_path):
    cfg = fast_config(tmp_path, supervision=[0.1, 1.0], anomaly_types=["local"], duplication=[2],
                      noise_ratios=[0.25], flip_ratios=[0.05])
    assert [s.id for s in build_settings(cfg)] == ["base", "gamma=0.1", "gamma=1", "type=local", "dup=2",
                                                   "noise=0.25", "flip=0.05"]


def test_grid_cardinality(tmp_path):
    table = run_grid(fast_config(tmp_path))
    assert len(table.records) == 2 * 3 * 1 * 3
    keys = [r.key for r in table.records]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys, key=lambda k: (k[0], ["knn", "hbos", "ecod"].index(k[1]), k[2], k[3]))


def test_grid_skips_label_informed_in_base(tmp_path):
    cfg = fast_config(tmp_path, algorithms=["knn", {"name": "rforest", "params": {"n_trees": 5}}],
                      supervision=[0.5], n_repeats=2)
    table = run_grid(cfg)
    settings = build_settings(cfg)
    total = 2 * 2 * len(settings) * 2
    assert len(table.records) + len(table.skipped) == total
    assert {(s.algorithm, s.setting) for s in table.skipped} == {("rforest", "base")}
    assert any(r.algorithm == "rforest" and r.setting == "gamma=0.5" for r in table.records)


def test_grid_errors_recorded_not_raised(tmp_path):
    cfg = fast_config(tmp_path, algorithms=[{"name": "knn", "params": {"k": 900}}, "hbos"], n_repeats=1)
    table = run_grid(cfg)
    assert {e.algorithm for e in table.errors} == {"knn"}
    assert all(e.error == "KTooLarge" and e.setting == "base" for e in table.errors)
    assert len(table.records) == 2


def test_grid_deterministic_and_parallel(tmp_path):
    cfg = fast_config(tmp_path, duplication=[3], flip_ratios=[0.1], n_repeats=2)
    a = run_grid(cfg)
    b = run_grid(cfg.with_overrides(threads=3))
    assert a.records == b.records


def test_corruption_only_changes_setting(tmp_path):
    cfg = fast_config(tmp_path, duplication=[1], n_repeats=1)
    table = run_grid(cfg)
    base = {(r.dataset, r.algorithm): r.aucroc for r in table.records if r.setting == "base"}
    dup1 = {(r.dataset, r.algorithm): r.aucroc for r in table.records if r.setting == "dup=1"}
    # factor 1 only shuffles rows; histogram and ECDF scores are order-free
    for key in base:
        if key[1] in ("hbos", "ecod"):
            assert base[key] == pytest.approx(dup1[key], abs=1e-12)


# emission

def test_emit_empty_table(tmp_path):
    paths = emit_results(ResultsTable(), tmp_path / "out")
    assert paths["results"].read_text() == ",".join(RESULTS_HEADER) + "\n"
    assert paths["summary"].read_text() == ",".join(SUMMARY_HEADER) + "\n"
    assert paths["skipped"].read_text().count("\n") == 1


def test_emit_round_trip_and_summary_ranks(tmp_path):
    recs = [MetricRecord(f"d{i}", a, "base", r, float(np.random.default_rng(i * 7 + r + len(a)).uniform()),
                         0.1 + 0.2 * r, 1.5, 2.25) for i in range(3) for a in ("a", "bb", "c") for r in range(2)]
    paths = emit_results(ResultsTable(records=recs), tmp_path)
    assert read_results(paths["results"]) == recs
    assert b"\r\n" not in paths["results"].read_bytes()
    with paths["summary"].open() as fh:
        rows = list(csv.DictReader(fh))
    t = rank_matrix(recs, "aucroc")
    for row in rows:
        if row["dataset"] == "*":
            assert float(row["rank_aucroc"]) == t.avg_rank(row["algorithm"])
        else:
            i, j = t.datasets.index(row["dataset"]), t.algorithms.index(row["algorithm"])
            assert float(row["rank_aucroc"]) == t.ranks[i, j]
            assert float(row["aucroc"]) == t.scores[i, j]


# CD rendering

def cd_records(cols):
    return [MetricRecord(f"d{i}", name, "s", 0, float(v), 0.5)
            for name, col in cols.items() for i, v in enumerate(col)]


def test_render_cd_identical(tmp_path):
    col = np.linspace(0.5, 0.9, 5)
    svg, txt = render_cd(cd_records({"x": col, "y": col, "z": col}), out_path=tmp_path / "cd.svg")
    assert [set(c) for c in read_cliques(svg)] == [{"x", "y", "z"}]
    assert "cliques:" in txt.read_text()


def test_render_cd_parse_back_and_deterministic(tmp_path):
    n = 10
    r = np.random.default_rng(0)
    cols = {"best": 0.9 + r.uniform(0, 0.05, n), "m1": 0.6 + r.uniform(0, 0.05, n),
            "m2": 0.6 + r.uniform(0, 0.05, n), "low": 0.3 + r.uniform(0, 0.05, n)}
    recs = cd_records(cols)
    svg, txt = render_cd(recs, out_path=tmp_path / "a.svg")
    res = cd_analysis(recs)
    assert read_cliques(svg) == list(res.cliques)
    svg2, _ = render_cd(recs, out_path=tmp_path / "b.svg")
    assert svg.read_bytes() == svg2.read_bytes()
    lines = txt.read_text().splitlines()
    start = lines.index("holm-adjusted p-values:") + 2
    P = np.array([[float(v) for v in line.split()[1:]] for line in lines[start:start + 4]])
    assert np.allclose(P, P.T)


def test_render_cd_multiple_settings_needs_choice(tmp_path):
    recs = cd_records({"a": [0.1, 0.2, 0.3], "b": [0.2, 0.3, 0.4]})
    recs += [MetricRecord(r.dataset, r.algorithm, "t", 0, r.aucroc, 0.5) for r in recs]
    with pytest.raises(ConfigError):
        render_cd(recs, out_path=tmp_path / "x.svg")
    render_cd(recs, out_path=tmp_path / "x.svg", setting="t")


# CLI

def test_cli_run_missing_config(capsys):
    assert main(["run"]) == 1
    assert "usage" in capsys.readouterr().err


def test_cli_run_nonexistent_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == 1


def test_cli_bad_flag(capsys):
    assert main(["synth", "--input", "a.csv", "--type", "weird", "--out", "b.csv"]) == 1
    assert "--type" in capsys.readouterr().err


def test_cli_run(tmp_path):
    dataset_file(tmp_path / "a.csv", n=1000, seed=1)
    dataset_file(tmp_path / "b.csv", n=1000, seed=2)
    dataset_file(tmp_path / "c.csv", n=1000, seed=3)
    write(tmp_path / "cfg.yaml", "datasets: [a.csv, b.csv, c.csv]\nalgorithms: [knn, hbos]\nn_repeats: 1\n"
                                 "record_timings: false\n")
    out = tmp_path / "res"
    assert main(["run", "--config", str(tmp_path / "cfg.yaml"), "--out", str(out), "--seed", "4"]) == 0
    for name in ("results.csv", "summary.csv", "skipped.csv", "errors.csv", "cd_base.svg", "cd_base.txt"):
        assert (out / name).exists()
    assert main(["cd", "--results", str(out / "results.csv"), "--metric", "aucpr",
                 "--out", str(tmp_path / "cd.svg")]) == 0
    assert (tmp_path / "cd.txt").exists()


def test_cli_run_data_error(tmp_path):
    write(tmp_path / "bad.csv", "f0,label\n1,0\nx,1\n")
    write(tmp_path / "cfg.yaml", "datasets: [bad.csv]\nalgorithms: [knn]\n")
    assert main(["run", "--config", str(tmp_path / "cfg.yaml")]) == 2


def test_cli_run_unknown_key(tmp_path):
    write(tmp_path / "cfg.yaml", "datasets: [a.csv]\nalgorithms: [knn]\nrepeats: 2\n")
    assert main(["run", "--config", str(tmp_path / "cfg.yaml")]) == 1


def test_cli_synth(tmp_path, capsys):
    dataset_file(tmp_path / "in.csv", n=300)
    assert main(["synth", "--input", str(tmp_path / "in.csv"), "--type", "local", "--out",
                 str(tmp_path / "o.csv")]) == 0
    assert "alpha=5" in capsys.readouterr().out
    X, y, _ = load_csv(tmp_path / "o.csv")
    assert len(y) == 300 and y.sum() == 15
    assert main(["synth", "--input", str(tmp_path / "in.csv"), "--type", "global", "--alpha", "-1",
                 "--out", str(tmp_path / "o.csv")]) == 1


def test_cli_synth_data_error(tmp_path):
    write(tmp_path / "in.csv", "f0,label\n1,0\n2,1\n")
    assert main(["synth", "--input", str(tmp_path / "in.csv"), "--type", "local",
                 "--out", str(tmp_path / "o.csv")]) == 2


def test_cli_corrupt(tmp_path):
    dataset_file(tmp_path / "in.csv", n=200)
    args = ["corrupt", "--input", str(tmp_path / "in.csv"), "--out", str(tmp_path / "c.csv")]
    assert main(args + ["--mode", "duplicate", "--level", "7"]) == 1
    assert main(args + ["--mode", "flip", "--level", "0.6"]) == 1
    assert main(args + ["--mode", "duplicate", "--level", "6"]) == 0
    _, ytr, _ = load_csv(tmp_path / "c_train.csv")
    _, yte, _ = load_csv(tmp_path / "c_test.csv")
    assert ytr.sum() == 6 * 7 and yte.sum() == 6 * 3
    assert main(args + ["--mode", "irrelevant", "--level", "0.5"]) == 0
    Xtr, _, names = load_csv(tmp_path / "c_train.csv")
    assert Xtr.shape[1] == 5 and names[-1] == "noise1"


def test_cli_cd_errors(tmp_path):
    write(tmp_path / "r.csv", ",".join(RESULTS_HEADER) + "\nd,a,s,0,0.5,0.5,0,0\n")
    assert main(["cd", "--results", str(tmp_path / "r.csv"), "--out", str(tmp_path / "x.svg")]) == 2
    assert main(["cd", "--results", str(tmp_path / "r.csv"), "--alpha", "2",
                 "--out", str(tmp_path / "x.svg")]) == 1
