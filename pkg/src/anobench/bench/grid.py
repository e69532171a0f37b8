"""Grid orchestration over datasets x settings x repeats x algorithms.

Seeds follow the path layout ``[dataset, algorithm slot, setting slot, repeat]``
where slot 0 means "shared": the train/test split and every algorithm's
seed are shared across settings, so a corrupted setting differs from
``base`` only by its corruption.

A *setting* is one of

* ``base``: the prepared dataset, no labels (label-informed algorithms skipped);
* ``gamma=<g>``: a fraction ``g`` of training anomalies revealed;
* ``type=<t>``: the dataset replaced by synthetic normals and type-``t`` anomalies;
* ``dup=<f>``, ``noise=<r>``, ``flip=<r>``: the three corruptions, applied after splitting.

Except for ``base`` and ``gamma``, label-informed algorithms see every
training anomaly (label ratio 1).
"""

from __future__ import annotations

import concurrent.futures as cf
import logging
import multiprocessing as mp
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import derive_seed
from ..corruptions import SplitDataset, add_irrelevant_features, duplicate_anomalies, flip_labels
from ..evaluation.metrics import aucpr, aucroc, measure_timing
from ..evaluation.splits import stratified_split, subsample_labels
from ..errors import DegenerateTable, MissingCell
from ..evaluation.stats import MetricRecord, rank_matrix
from ..synthgen import SynthParams, assemble_synthetic, fit_normal_model
from .config import BenchmarkConfig
from .io import ERRORS_HEADER, SKIPPED_HEADER, load_csv, write_results, write_rows
from .prep import prep_dataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Setting:
    id: str
    kind: str
    value: object = None
    gamma: float | None = 1.0


@dataclass(frozen=True)
class ErrorRow:
    dataset: str
    algorithm: str
    setting: str
    repeat: int
    error: str
    message: str


@dataclass(frozen=True)
class SkippedRow:
    dataset: str
    algorithm: str
    setting: str
    repeat: int
    reason: str


@dataclass
class ResultsTable:
    records: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)


def _num(v) -> str:
    return repr(float(v)).rstrip("0").rstrip(".") if float(v) != int(v) else str(int(v))


def build_settings(config: BenchmarkConfig) -> list[Setting]:
    settings = [Setting("base", "base", None, None)]
    settings += [Setting(f"gamma={_num(g)}", "gamma", float(g), float(g)) for g in config.supervision]
    settings += [Setting(f"type={t}", "type", t) for t in config.anomaly_types]
    settings += [Setting(f"dup={int(f)}", "dup", int(f)) for f in config.duplication]
    settings += [Setting(f"noise={_num(r)}", "noise", float(r)) for r in config.noise_ratios]
    settings += [Setting(f"flip={_num(r)}", "flip", float(r)) for r in config.flip_ratios]
    seen = set()
    for s in settings:
        if s.id in seen:
            raise ValueError(f"duplicate setting {s.id!r}")
        seen.add(s.id)
    return settings


def dataset_ids(paths) -> list[str]:
    ids = []
    for p in paths:
        base = Path(p).stem
        name, i = base, 1
        while name in ids:
            i += 1
            name = f"{base}_{i}"
        ids.append(name)
    return ids


@dataclass(frozen=True)
class CellTask:
    d_idx: int
    dataset: str
    X: np.ndarray
    y: np.ndarray
    model: object
    s_idx: int
    setting: Setting
    repeat: int
    algorithms: tuple
    master: int
    train_frac: float
    record_timings: bool


def _prepare_split(task: CellTask) -> tuple[SplitDataset, np.ndarray | None]:
    """Data, split and label mask for one cell (mask None = no labels)."""
    s, d, r = task.setting, task.d_idx, task.repeat
    setting_seed = derive_seed(task.master, [d, 0, task.s_idx + 1, r])
    split_seed = derive_seed(task.master, [d, 0, 0, r])
    X, y = task.X, task.y
    if s.kind == "type":
        X, y = assemble_synthetic(X, y, SynthParams(s.value, seed=setting_seed), model=task.model)
    split = stratified_split(X, y, task.train_frac, split_seed)
    if s.kind == "dup":
        split = duplicate_anomalies(split, s.value, setting_seed)
    elif s.kind == "noise":
        split = add_irrelevant_features(split, s.value, setting_seed)
    elif s.kind == "flip":
        split = flip_labels(split, s.value, setting_seed)
    if s.gamma is None:
        mask = None
    elif s.gamma >= 1.0:
        mask = split.y_train == 1
    else:
        mask = subsample_labels(split.y_train, s.gamma, derive_seed(setting_seed, [1]))
    return split, mask


def run_cell(task: CellTask):
    """Fit and score every algorithm for one (dataset, setting, repeat) cell."""
    records, errors, skipped = [], [], []
    s = task.setting
    key = (task.dataset, s.id, task.repeat)
    try:
        split, mask = _prepare_split(task)
    except Exception as exc:  # cell-level failure: every algorithm errors out
        for a_idx, spec in enumerate(task.algorithms):
            errors.append(((task.d_idx, a_idx, task.s_idx, task.repeat),
                           ErrorRow(key[0], spec.name, key[1], key[2], type(exc).__name__, str(exc))))
        return records, errors, skipped
    for a_idx, spec in enumerate(task.algorithms):
        order = (task.d_idx, a_idx, task.s_idx, task.repeat)
        det = spec.build()
        if det.label_informed and mask is None:
            skipped.append((order, SkippedRow(key[0], spec.name, key[1], key[2],
                                              "label-informed algorithm in an unlabeled setting")))
            continue
        seed = derive_seed(task.master, [task.d_idx, a_idx + 1, 0, task.repeat])
        try:
            if det.label_informed:
                fit = lambda: det.fit(split.X_train, split.y_train, mask, seed)  # noqa: E731
            else:
                fit = lambda: det.fit(split.X_train, seed=seed)  # noqa: E731
            scores, fit_ms, score_ms = measure_timing(fit, lambda: det.score(split.X_test))
            if not task.record_timings:
                fit_ms = score_ms = 0.0
            records.append((order, MetricRecord(
                key[0], spec.name, key[1], key[2],
                aucroc(scores, split.y_test), aucpr(scores, split.y_test), fit_ms, score_ms)))
        except Exception as exc:
            errors.append((order, ErrorRow(key[0], spec.name, key[1], key[2],
                                           type(exc).__name__, str(exc))))
    return records, errors, skipped


def load_prepared(config: BenchmarkConfig):
    paths = config.dataset_paths()
    ids = dataset_ids(paths)
    data = []
    for d_idx, path in enumerate(paths):
        X, y, _ = load_csv(path)
        data.append(prep_dataset(X, y, derive_seed(config.seed, [d_idx])))
    return ids, data


def run_grid(config: BenchmarkConfig, datasets=None) -> ResultsTable:
    """Evaluate every configured cell; failures become error rows, never abort.

    ``datasets`` optionally supplies ``[(name, X, y), ...]`` in place of the
    configured CSV paths (already prepared data; no resizing is applied).
    """
    if datasets is None:
        ids, data = load_prepared(config)
    else:
        ids = [name for name, _, _ in datasets]
        data = [(np.asarray(X, float), np.asarray(y)) for _, X, y in datasets]
    settings = build_settings(config)
    needs_gmm = any(s.kind == "type" and s.value != "dependency" for s in settings)
    tasks = []
    for d_idx, (name, (X, y)) in enumerate(zip(ids, data)):
        model = None
        if needs_gmm:
            try:
                model = fit_normal_model(X, y, derive_seed(config.seed, [d_idx, 0, 0]))
            except Exception as exc:
                log.warning("generator fit failed for %s: %s", name, exc)
        for s_idx, setting in enumerate(settings):
            for r in range(config.n_repeats):
                tasks.append(CellTask(d_idx, name, X, y, model, s_idx, setting, r,
                                      config.algorithms, config.seed, config.train_frac,
                                      config.record_timings))
    if config.threads <= 1 or len(tasks) <= 1:
        outputs = [run_cell(t) for t in tasks]
    else:
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
        with cf.ProcessPoolExecutor(max_workers=config.threads, mp_context=ctx) as pool:
            outputs = list(pool.map(run_cell, tasks))
    table = ResultsTable()
    recs, errs, skips = [], [], []
    for r, e, s in outputs:
        recs += r
        errs += e
        skips += s
    table.records = [rec for _, rec in sorted(recs, key=lambda t: t[0])]
    table.errors = [row for _, row in sorted(errs, key=lambda t: t[0])]
    table.skipped = [row for _, row in sorted(skips, key=lambda t: t[0])]
    return table


SUMMARY_HEADER = ("dataset", "algorithm", "setting", "aucroc", "aucpr", "fit_ms", "score_ms",
                  "rank_aucroc", "rank_aucpr")


def summary_rows(records) -> list[tuple]:
    """Per-cell means and ranks, then one ``dataset="*"`` row per algorithm with average ranks.

    Ranks come from ``rank_matrix`` over each setting separately; they are
    left blank when a setting has missing cells.
    """
    by_setting: dict[str, list] = {}
    for r in records:
        by_setting.setdefault(r.setting, []).append(r)
    rows = []
    for setting, recs in by_setting.items():
        tables = {}
        for metric in ("aucroc", "aucpr"):
            try:
                tables[metric] = rank_matrix(recs, metric)
            except (MissingCell, DegenerateTable):
                tables[metric] = None

        def rank_of(metric, d, a):
            t = tables[metric]
            if t is None:
                return ""
            return float(t.ranks[t.datasets.index(d), t.algorithms.index(a)])

        cells: dict[tuple, list] = {}
        for r in recs:
            cells.setdefault((r.dataset, r.algorithm), []).append(r)
        for (d, a), group in sorted(cells.items()):
            means = [float(np.mean([getattr(g, f) for g in group]))
                     for f in ("aucroc", "aucpr", "fit_ms", "score_ms")]
            rows.append((d, a, setting, *means, rank_of("aucroc", d, a), rank_of("aucpr", d, a)))
        for a in sorted({a for _, a in cells}):
            avg = []
            for metric in ("aucroc", "aucpr"):
                t = tables[metric]
                avg.append("" if t is None else t.avg_rank(a))
            rows.append(("*", a, setting, "", "", "", "", *avg))
    return rows


def emit_results(table: ResultsTable, out_dir) -> dict[str, Path]:
    """Write results, summary, skipped and errors CSVs into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("results", "summary", "skipped", "errors")}
    write_results(paths["results"], table.records)
    write_rows(paths["summary"], SUMMARY_HEADER, summary_rows(table.records))
    write_rows(paths["skipped"], SKIPPED_HEADER,
               ((s.dataset, s.algorithm, s.setting, s.repeat, s.reason) for s in table.skipped))
    write_rows(paths["errors"], ERRORS_HEADER,
               ((e.dataset, e.algorithm, e.setting, e.repeat, e.error, e.message) for e in table.errors))
    return paths
