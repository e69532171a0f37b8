"""CSV formats: labelled datasets and benchmark result tables.

Dataset files have a header row, numeric feature columns and a final
``label`` column holding 0 or 1. Floats are written with ``repr`` (shortest
round-trip form) so that reading a written file reproduces it exactly.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..core import validate_dataset
from ..errors import LabelDomain, MissingLabelColumn, ParseError
from ..evaluation.stats import MetricRecord

RESULTS_HEADER = ("dataset", "algorithm", "setting", "repeat", "aucroc", "aucpr", "fit_ms", "score_ms")
ERRORS_HEADER = ("dataset", "algorithm", "setting", "repeat", "error", "message")
SKIPPED_HEADER = ("dataset", "algorithm", "setting", "repeat", "reason")


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def load_csv(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Read a labelled dataset; returns ``(X, y, feature_names)``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected a header row") from None
        if "label" not in header:
            raise MissingLabelColumn(f"{path}: no 'label' column in header {header}")
        if header[-1] != "label":
            raise MissingLabelColumn(f"{path}: 'label' must be the final column")
        if len(header) < 2:
            raise ParseError(f"{path}: no feature columns")
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: line {line_no} has {len(row)} fields, expected {len(header)}")
            values = []
            for col, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {line_no}, column {col + 1} ({header[col]!r}): "
                        f"non-numeric value {cell!r}") from None
                if not math.isfinite(v):
                    raise ParseError(f"{path}: line {line_no}, column {col + 1} ({header[col]!r}): "
                                     f"non-finite value {cell!r}")
                values.append(v)
            if values[-1] not in (0.0, 1.0):
                raise LabelDomain(f"{path}: line {line_no}: label {row[-1]!r} is not 0 or 1")
            rows.append(values[:-1])
            labels.append(int(values[-1]))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    X, y = validate_dataset(np.array(rows), np.array(labels))
    return X, y, header[:-1]


def write_dataset_csv(path, X, y, feature_names=None) -> None:
    X = np.asarray(X, dtype=float)
    names = list(feature_names) if feature_names is not None else []
    names += [f"f{j}" for j in range(len(names), X.shape[1])]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["label"])
        for row, label in zip(X, y):
            w.writerow([fmt(v) for v in row] + [int(label)])


def write_rows(path, header, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_results(path, records) -> None:
    write_rows(path, RESULTS_HEADER,
               ((r.dataset, r.algorithm, r.setting, r.repeat, r.aucroc, r.aucpr, r.fit_ms, r.score_ms)
                for r in records))


def read_results(path) -> list[MetricRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != RESULTS_HEADER:
            raise ParseError(f"{path}: unexpected header {header}")
        out = []
        for line_no, row in enumerate(reader, start=2):
            try:
                out.append(MetricRecord(row[0], row[1], row[2], int(row[3]), float(row[4]),
                                        float(row[5]), float(row[6]), float(row[7])))
            except (IndexError, ValueError) as exc:
                raise ParseError(f"{path}: line {line_no}: {exc}") from None
    return out
