"""Critical-difference diagrams as SVG plus a plain-text companion."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from ..errors import ConfigError
from ..evaluation.stats import CdResult, cd_analysis

CLIQUE_GID_PREFIX = "clique:"
TICK_GID_PREFIX = "algo:"


def _single_setting(records, setting):
    records = list(records)
    settings = list(dict.fromkeys(r.setting for r in records))
    if setting is None:
        if len(settings) > 1:
            raise ConfigError(f"records span several settings {settings}; choose one")
        return records
    return [r for r in records if r.setting == setting]


def cd_text(result: CdResult, metric: str) -> str:
    names = result.algorithms
    width = max(len(a) for a in names)
    lines = [f"metric: {metric}", f"alpha: {result.alpha!r}",
             f"friedman: statistic={float(result.friedman_stat)!r} p={float(result.friedman_p)!r}", "", "average ranks:"]
    lines += [f"  {a:<{width}}  {float(r)!r}" for a, r in zip(names, result.avg_ranks)]
    lines += ["", "holm-adjusted p-values:", "  " + " " * width + "  " + "  ".join(f"{a:>10}" for a in names)]
    for a, row in zip(names, result.p_adjusted):
        lines.append(f"  {a:<{width}}  " + "  ".join(f"{p:>10.6f}" for p in row))
    lines += ["", "cliques:"]
    lines += [f"  {' | '.join(c)}" for c in result.cliques] or ["  (none)"]
    return "\n".join(lines) + "\n"


def draw_cd(result: CdResult, metric: str = "aucroc") -> Figure:
    k = len(result.algorithms)
    ranks = result.avg_ranks
    half = (k + 1) // 2
    n_bars = len(result.cliques)
    height = 1.2 + 0.3 * half + 0.2 * n_bars
    fig = Figure(figsize=(max(6.0, 0.7 * k + 3), height))
    ax = fig.add_axes((0.03, 0.0, 0.94, 1.0))
    ax.set_xlim(0.5, k + 0.5)
    top = 0.0
    ymin = -(0.6 + 0.3 * half + 0.2 * n_bars)
    ax.set_ylim(ymin, 0.6)
    ax.axis("off")
    ax.hlines(top, 1, k, color="black", lw=1.0)
    for t in range(1, k + 1):
        ax.vlines(t, top, top + 0.08, color="black", lw=1.0)
        ax.text(t, top + 0.14, str(t), ha="center", va="bottom", fontsize=9)
    # best ranks on the left, labels fan out from both ends
    for i, (name, r) in enumerate(zip(result.algorithms, ranks)):
        left = i < half
        level = i if left else k - 1 - i
        y = -(0.35 + 0.3 * level + 0.2 * n_bars)
        x_end = 0.6 if left else k + 0.4
        line, = ax.plot([r, r, x_end], [top, y, y], color="black", lw=0.8)
        line.set_gid(f"{TICK_GID_PREFIX}{name}")
        ax.text(x_end, y + 0.03, f"{name} ({r:.2f})", ha="left" if left else "right",
                va="bottom", fontsize=9)
    for b, clique in enumerate(result.cliques):
        idx = [result.algorithms.index(a) for a in clique]
        lo, hi = float(np.min(ranks[idx])), float(np.max(ranks[idx]))
        y = -(0.15 + 0.2 * b)
        bar, = ax.plot([lo - 0.03, hi + 0.03], [y, y], color="black", lw=3.0, solid_capstyle="butt")
        bar.set_gid(CLIQUE_GID_PREFIX + "|".join(clique))
    ax.set_title(f"average rank ({metric}, alpha={result.alpha:g})", fontsize=9, y=0.95)
    return fig


def render_cd(records, metric: str = "aucroc", alpha: float = 0.05, out_path="cd.svg",
              setting: str | None = None) -> tuple[Path, Path]:
    """Write ``out_path`` (SVG) and a ``.txt`` companion; returns both paths."""
    result = cd_analysis(_single_setting(records, setting), metric, alpha)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig = draw_cd(result, metric)
    with matplotlib.rc_context({"svg.hashsalt": "anobench", "svg.fonttype": "path"}):
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    txt = out_path.with_suffix(".txt")
    txt.write_text(cd_text(result, metric), encoding="utf-8", newline="\n")
    return out_path, txt


def read_cliques(svg_path) -> list[tuple[str, ...]]:
    """Clique memberships recovered from the bar ids of a rendered SVG."""
    out = []
    for el in ET.parse(svg_path).iter():
        gid = el.get("id", "")
        if gid.startswith(CLIQUE_GID_PREFIX):
            out.append(tuple(gid[len(CLIQUE_GID_PREFIX):].split("|")))
    return out
