"""Rank-based comparison of algorithms across datasets.

Average ranks, the Friedman omnibus test, pairwise Wilcoxon signed-rank tests
with Holm's step-down correction, and the maximal groups of algorithms that
are not significantly different (the bars of a critical-difference diagram).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.stats import chi2, norm, rankdata

from ..errors import DegenerateTable, LengthMismatch, MissingCell, TooFewPairs

METRICS = ("aucroc", "aucpr")
EXACT_MAX_N = 20


@dataclass(frozen=True)
class MetricRecord:
    dataset: str
    algorithm: str
    setting: str
    repeat: int
    aucroc: float
    aucpr: float
    fit_ms: float = 0.0
    score_ms: float = 0.0

    def __post_init__(self):
        for name in METRICS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.fit_ms < 0 or self.score_ms < 0:
            raise ValueError("timings must be non-negative")

    @property
    def key(self):
        return (self.dataset, self.algorithm, self.setting, self.repeat)


@dataclass(frozen=True)
class RankTable:
    """Per-dataset ranks (rank 1 = best metric) and the aggregated metric behind them."""

    datasets: tuple
    algorithms: tuple
    metric: str
    scores: np.ndarray  # (n_datasets, n_algorithms) aggregated metric
    ranks: np.ndarray   # (n_datasets, n_algorithms) midranks

    @property
    def avg_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)

    def avg_rank(self, algorithm: str) -> float:
        return float(self.avg_ranks[self.algorithms.index(algorithm)])


def rank_rows(scores: np.ndarray) -> np.ndarray:
    """Rank each row descending (higher metric -> rank 1) with tie-averaged ranks."""
    return np.vstack([rankdata(-row) for row in np.atleast_2d(scores)])


def rank_matrix(records: Iterable[MetricRecord], metric: str = "aucroc",
                aggregate: str = "mean") -> RankTable:
    """Aggregate repeats per (dataset, algorithm), then rank algorithms within each dataset.

    All records must share one setting. ``aggregate`` is ``"mean"`` or ``"median"``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    agg = {"mean": np.mean, "median": np.median}[aggregate]
    cells: dict[tuple[str, str], list[float]] = {}
    settings = set()
    for r in records:
        settings.add(r.setting)
        cells.setdefault((r.dataset, r.algorithm), []).append(getattr(r, metric))
    if len(settings) > 1:
        raise ValueError(f"rank_matrix needs records from one setting, got {sorted(settings)}")
    datasets = tuple(sorted({d for d, _ in cells}))
    algorithms = tuple(sorted({a for _, a in cells}))
    if not datasets:
        raise DegenerateTable("no records to rank")
    scores = np.empty((len(datasets), len(algorithms)))
    for i, d in enumerate(datasets):
        for j, a in enumerate(algorithms):
            if (d, a) not in cells:
                raise MissingCell(f"no {metric} for algorithm {a!r} on dataset {d!r}")
            scores[i, j] = agg(cells[(d, a)])
    return RankTable(datasets, algorithms, metric, scores, rank_rows(scores))


def friedman_test(ranks: RankTable | np.ndarray) -> tuple[float, float]:
    """Friedman chi-square statistic over mean ranks and its p-value (k - 1 d.o.f.)."""
    R = ranks.ranks if isinstance(ranks, RankTable) else np.asarray(ranks, dtype=float)
    if R.ndim != 2 or R.shape[0] < 2 or R.shape[1] < 2:
        raise DegenerateTable(f"Friedman test needs >= 2 datasets and >= 2 algorithms, got {R.shape}")
    N, k = R.shape
    mean_ranks = R.mean(axis=0)
    stat = 12.0 * N / (k * (k + 1)) * (np.sum(mean_ranks ** 2) - k * (k + 1) ** 2 / 4.0)
    stat = max(float(stat), 0.0)
    if stat < 1e-12:
        return 0.0, 1.0
    return stat, float(chi2.sf(stat, k - 1))


def signed_rank_null(doubled_ranks: Sequence[int]) -> np.ndarray:
    """Exact null distribution of the (doubled) positive-rank sum over all 2**n sign patterns.

    Entry ``s`` is the probability that the doubled sum equals ``s``.
    """
    total = int(sum(doubled_ranks))
    dist = np.zeros(total + 1)
    dist[0] = 1.0
    for a in doubled_ranks:
        shifted = np.zeros_like(dist)
        shifted[a:] = dist[:len(dist) - a]
        dist = 0.5 * (dist + shifted)
    return dist


def wilcoxon_signed_rank(a, b, exact_max_n: int = EXACT_MAX_N) -> float:
    """Two-sided paired Wilcoxon signed-rank p-value.

    Zero differences are dropped and tied magnitudes get midranks. Up to
    ``exact_max_n`` non-zero pairs the p-value is exact; above that a normal
    approximation with tie and continuity corrections is used.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"paired samples differ in shape: {a.shape} vs {b.shape}")
    if len(a) < 3:
        raise TooFewPairs(f"need >= 3 pairs, got {len(a)}")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return 1.0
    r = rankdata(np.abs(d))
    t_plus = float(r[d > 0].sum())
    if n <= exact_max_n:
        doubled = np.rint(2 * r).astype(int)
        dist = signed_rank_null(doubled)
        t2 = int(round(2 * t_plus))
        p_upper = dist[t2:].sum()
        p_lower = dist[:t2 + 1].sum()
        return float(min(1.0, 2.0 * min(p_upper, p_lower)))
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(r, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(counts ** 3 - counts) / 48.0
    if var <= 0:
        return 1.0
    z = max(abs(t_plus - mean) - 0.5, 0.0) / math.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(z)))


def holm_adjust(p_values) -> np.ndarray:
    """Holm step-down adjusted p-values, returned in the input order."""
    p = np.asarray(p_values, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    stepped = np.minimum(1.0, (m - np.arange(m)) * p[order])
    adjusted = np.empty(m)
    adjusted[order] = np.maximum.accumulate(stepped)
    return adjusted


@dataclass(frozen=True)
class CdResult:
    algorithms: tuple          # ordered by average rank, best first
    avg_ranks: np.ndarray
    friedman_stat: float
    friedman_p: float
    p_adjusted: np.ndarray     # symmetric, unit diagonal, indexed like ``algorithms``
    cliques: tuple             # tuples of algorithm names, each a maximal non-significant group
    alpha: float = 0.05


def cd_cliques(ranks: RankTable, alpha: float = 0.05) -> CdResult:
    """Wilcoxon-Holm comparison of every algorithm pair on per-dataset metrics.

    Two algorithms are connected when their Holm-adjusted p-value exceeds
    ``alpha``; the reported cliques are the maximal cliques (>= 2 members) of
    that graph, ordered by the best average rank among their members.
    """
    N, k = ranks.scores.shape
    if k < 2 or N < 3:
        raise DegenerateTable(f"CD analysis needs >= 2 algorithms and >= 3 datasets, got {k} and {N}")
    stat, p_friedman = friedman_test(ranks)
    avg = ranks.avg_ranks
    order = np.argsort(avg, kind="stable")
    algos = tuple(ranks.algorithms[i] for i in order)
    S = ranks.scores[:, order]
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    raw = [wilcoxon_signed_rank(S[:, i], S[:, j]) for i, j in pairs]
    adj = holm_adjust(raw)
    P = np.eye(k)
    graph = nx.Graph()
    graph.add_nodes_from(range(k))
    for (i, j), p in zip(pairs, adj):
        P[i, j] = P[j, i] = p
        if p > alpha:
            graph.add_edge(i, j)
    cliques = [sorted(c) for c in nx.find_cliques(graph) if len(c) >= 2]
    cliques.sort(key=lambda c: (c[0], -len(c), c))
    return CdResult(
        algorithms=algos,
        avg_ranks=avg[order],
        friedman_stat=stat,
        friedman_p=p_friedman,
        p_adjusted=P,
        cliques=tuple(tuple(algos[i] for i in c) for c in cliques),
        alpha=alpha,
    )


def cd_analysis(records: Iterable[MetricRecord], metric: str = "aucroc", alpha: float = 0.05,
                aggregate: str = "mean") -> CdResult:
    return cd_cliques(rank_matrix(records, metric, aggregate), alpha)
