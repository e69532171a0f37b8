"""Benchmark configuration: a YAML mapping with a fixed set of keys.

Example::

    datasets: [data/cardio.csv, data/thyroid.csv]
    algorithms: [knn, lof, {name: iforest, params: {n_trees: 50}}, rforest]
    supervision: [0.1, 1.0]
    anomaly_types: [local, global]
    duplication: [6]
    noise_ratios: [0.5]
    flip_ratios: [0.05]
    n_repeats: 3
    train_frac: 0.7
    seed: 0
    threads: 4
    out_dir: results
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from ..corruptions import MAX_DUPLICATION, MAX_FLIP_RATIO, MAX_NOISE_RATIO
from ..detectors import make_detector
from ..errors import AnobenchError, ConfigError
from ..synthgen import ANOMALY_TYPES

GAMMA_CHOICES = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0)
THREADS_ENV = "ADBENCH_THREADS"


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    params: tuple = ()

    @property
    def label_informed(self) -> bool:
        return self.build().label_informed

    def build(self):
        return make_detector(self.name, **dict(self.params))


@dataclass(frozen=True)
class BenchmarkConfig:
    datasets: tuple
    algorithms: tuple
    supervision: tuple = ()
    anomaly_types: tuple = ()
    duplication: tuple = ()
    noise_ratios: tuple = ()
    flip_ratios: tuple = ()
    n_repeats: int = 3
    train_frac: float = 0.7
    seed: int = 0
    threads: int = 1
    out_dir: str = "results"
    record_timings: bool = True
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("datasets: at least one dataset path is required")
        if not self.algorithms:
            raise ConfigError("algorithms: at least one algorithm is required")
        for g in self.supervision:
            if not any(abs(g - c) < 1e-12 for c in GAMMA_CHOICES):
                raise ConfigError(f"supervision: {g} not in {GAMMA_CHOICES}")
        for t in self.anomaly_types:
            if t not in ANOMALY_TYPES:
                raise ConfigError(f"anomaly_types: {t!r} not in {ANOMALY_TYPES}")
        for f in self.duplication:
            if int(f) != f or not 1 <= f <= MAX_DUPLICATION:
                raise ConfigError(f"duplication: factor {f} outside 1..{MAX_DUPLICATION}")
        for key, cap in (("noise_ratios", MAX_NOISE_RATIO), ("flip_ratios", MAX_FLIP_RATIO)):
            for r in getattr(self, key):
                if not 0.0 <= r <= cap:
                    raise ConfigError(f"{key}: {r} outside [0, {cap}]")
        if int(self.n_repeats) != self.n_repeats or self.n_repeats < 1:
            raise ConfigError(f"n_repeats must be a positive integer, got {self.n_repeats}")
        if not 0.0 < self.train_frac < 1.0:
            raise ConfigError(f"train_frac must be in (0, 1), got {self.train_frac}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError(f"threads must be a positive integer, got {self.threads}")
        for spec in self.algorithms:
            try:
                spec.build()
            except (AnobenchError, ValueError, TypeError) as exc:
                raise ConfigError(f"algorithms: {spec.name}: {exc}") from None

    def dataset_paths(self) -> list[Path]:
        return [p if p.is_absolute() else self.base_dir / p for p in map(Path, self.datasets)]

    def with_overrides(self, **kw) -> "BenchmarkConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_LIST_KEYS = ("datasets", "supervision", "anomaly_types", "duplication", "noise_ratios", "flip_ratios")
_SCALAR_KEYS = ("n_repeats", "train_frac", "seed", "threads", "out_dir", "record_timings")
KNOWN_KEYS = frozenset(("algorithms",) + _LIST_KEYS + _SCALAR_KEYS)


def _algorithm(entry) -> AlgorithmSpec:
    if isinstance(entry, str):
        return AlgorithmSpec(entry)
    if isinstance(entry, dict) and set(entry) <= {"name", "params"} and "name" in entry:
        params = entry.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError(f"algorithms: params of {entry['name']!r} must be a mapping")
        return AlgorithmSpec(str(entry["name"]), tuple(sorted(
            (k, tuple(v) if isinstance(v, list) else v) for k, v in params.items())))
    raise ConfigError(f"algorithms: cannot read entry {entry!r}; use a name or {{name, params}}")


def config_from_mapping(data: dict, base_dir=".") -> BenchmarkConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {unknown}")
    kw = {}
    for key in _LIST_KEYS:
        if key in data:
            value = data[key]
            if not isinstance(value, list):
                raise ConfigError(f"{key} must be a list")
            kw[key] = tuple(value)
    for key in _SCALAR_KEYS:
        if key in data:
            kw[key] = data[key]
    if "algorithms" not in data or not isinstance(data["algorithms"], list):
        raise ConfigError("algorithms must be a list")
    kw["algorithms"] = tuple(_algorithm(a) for a in data["algorithms"])
    if "threads" not in kw and os.environ.get(THREADS_ENV):
        try:
            kw["threads"] = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    try:
        return BenchmarkConfig(**kw, base_dir=Path(base_dir))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> BenchmarkConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_mapping(data, base_dir=path.parent)
