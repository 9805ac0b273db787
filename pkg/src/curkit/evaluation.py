"""Accuracy, timing and feature-separation metrics."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .baselines import deim_cur, ls_deterministic_cur, ls_randomized_cur, qr_cur
from .decomposition import CurDecomposition
from .errors import ConfigurationError, DataError
from .matrix_io import LabeledMatrix
from .numerics import truncated_svd
from .sfcur import sf_cur
from .solver import SfConfig

__all__ = [
    "CUR_METHODS",
    "run_cur",
    "relative_error",
    "svd_relative_error",
    "separation_counts",
    "SelectionReport",
    "selection_report",
    "CurvePoint",
    "ErrorCurve",
    "sweep_error_curve",
]

CUR_METHODS = ("sf", "ls-d", "ls-r", "deim", "qr")
LS_R_REPEATS = 5


def run_cur(X, method: str, c: int, r: int, rank_k=None, seed: int = 0,
            cfg: Optional[SfConfig] = None) -> CurDecomposition:
    """Dispatch to one of :data:`CUR_METHODS`.  DEIM requires ``c == r``."""
    cfg = SfConfig() if cfg is None else cfg
    if method == "sf":
        return sf_cur(X, c, r, cfg)
    if method == "ls-d":
        return ls_deterministic_cur(X, c, r, rank_k, cfg.rank_tol)
    if method == "ls-r":
        return ls_randomized_cur(X, c, r, rank_k, seed, cfg.rank_tol)
    if method == "deim":
        if c != r:
            raise ConfigurationError(f"DEIM CUR selects c = r = k; got c={c}, r={r}")
        return deim_cur(X, c, cfg.rank_tol)
    if method == "qr":
        return qr_cur(X, c, r, cfg.rank_tol)
    raise ConfigurationError(f"unknown CUR method {method!r}")


def relative_error(X, dec: CurDecomposition) -> float:
    """``||X - C U R||_F / ||X||_F``."""
    X = np.asarray(X, dtype=float)
    norm = np.linalg.norm(X)
    if norm == 0:
        raise DataError("relative error undefined for a zero matrix")
    return float(np.linalg.norm(X - dec.reconstruct(X)) / norm)


def svd_relative_error(X, k: int) -> float:
    """Relative Frobenius error of the best rank-``k`` approximation."""
    X = np.asarray(X, dtype=float)
    norm = np.linalg.norm(X)
    if norm == 0:
        raise DataError("relative error undefined for a zero matrix")
    return float(np.linalg.norm(X - truncated_svd(X, k).reconstruct()) / norm)


def _two_classes(X: LabeledMatrix):
    if X.class_of_row is None:
        raise DataError("per-row class labels are required")
    classes = sorted(set(X.class_of_row), key=str)
    if len(classes) != 2:
        raise DataError(f"exactly two classes are required, found {len(classes)}")
    return classes


def separation_counts(X: LabeledMatrix, feature: int, threshold: float = 1.0):
    """Rows of each class whose entry in column ``feature`` exceeds ``threshold``.

    Classes are ordered by their sorted label.
    """
    classes = _two_classes(X)
    labels = np.asarray(X.class_of_row, dtype=object)
    above = X.matrix[:, feature] > threshold
    return tuple(int(np.count_nonzero(above & (labels == cls))) for cls in classes)


@dataclass
class SelectionReport:
    """Class-separation statistics for a set of selected features."""

    selected: list
    labels: Optional[list]
    classes: list
    per_feature: list  # (count_a, count_b, abs_diff)
    median_diff: float
    mean_diff: float
    std_diff: float
    std_defined: bool
    ddof: int = 1

    def as_dict(self) -> dict:
        return {
            "selected": self.selected,
            "labels": self.labels,
            "classes": [str(c) for c in self.classes],
            "per_feature": [
                {"count_a": a, "count_b": b, "abs_diff": d} for a, b, d in self.per_feature
            ],
            "median_diff": self.median_diff,
            "mean_diff": self.mean_diff,
            "std_diff": self.std_diff,
            "std_defined": self.std_defined,
            "ddof": self.ddof,
        }


def selection_report(X: LabeledMatrix, selected: Sequence[int], threshold: float = 1.0,
                     ddof: int = 1) -> SelectionReport:
    """Per-feature class counts and summary statistics of the ``|count_a - count_b|``.

    The standard deviation uses ``ddof`` (sample estimator by default); with
    too few features it is reported as 0 and ``std_defined`` is False.
    """
    selected = [int(j) for j in selected]
    if not selected:
        raise DataError("empty selection")
    classes = _two_classes(X)
    rows = []
    for j in selected:
        a, b = separation_counts(X, j, threshold)
        rows.append((a, b, abs(a - b)))
    diffs = np.array([d for _, _, d in rows], dtype=float)
    defined = diffs.size > ddof
    return SelectionReport(
        selected=selected,
        labels=[X.col_labels[j] for j in selected] if X.col_labels else None,
        classes=classes,
        per_feature=rows,
        median_diff=float(np.median(diffs)),
        mean_diff=float(diffs.mean()),
        std_diff=float(diffs.std(ddof=ddof)) if defined else 0.0,
        std_defined=defined,
        ddof=ddof,
    )


@dataclass
class CurvePoint:
    method: str
    k: int
    relative_error: float
    relative_error_std: float
    wall_time: float
    wall_time_std: float
    runs: int
    n_cols: float
    n_rows: float
    status: str = "ok"


@dataclass
class ErrorCurve:
    """Relative error and timing per (method, c = r = k) grid point."""

    points: list = field(default_factory=list)

    def for_method(self, method: str) -> list:
        return [p for p in self.points if p.method == method]

    def write_error_csv(self, path) -> None:
        self._write(path, ("method", "k", "relative_error", "relative_error_std",
                           "runs", "n_cols", "n_rows", "status"))

    def write_timing_csv(self, path) -> None:
        self._write(path, ("method", "k", "wall_time", "wall_time_std", "runs"))

    def _write(self, path, columns):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("schema_version",) + columns)
            for p in self.points:
                writer.writerow((1,) + tuple(
                    format(v, ".17g") if isinstance(v, float) else v
                    for v in (getattr(p, c) for c in columns)
                ))


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def sweep_error_curve(X, methods: Sequence[str], grid: Sequence[int], seed: int = 0,
                      rank_k=None, cfg: Optional[SfConfig] = None,
                      with_svd: bool = True) -> ErrorCurve:
    """Relative error and wall time of each method at every ``c = r = k`` in ``grid``.

    LS-R is repeated with seeds ``seed .. seed+4`` and reported as mean and
    standard deviation.  The rank-``k`` SVD is included as method ``"svd"``
    when ``with_svd`` is set.  Timings cover the method call only.
    """
    X = np.asarray(X, dtype=float)
    limit = min(X.shape)
    for k in grid:
        if not 1 <= k <= limit:
            raise ConfigurationError(f"grid value {k} outside [1, {limit}]")
    for method in methods:
        if method not in CUR_METHODS and method != "svd":
            raise ConfigurationError(f"unknown method {method!r}")

    curve = ErrorCurve()
    methods = [m for m in methods if m != "svd"]
    for method in methods:
        for k in grid:
            seeds = [seed + i for i in range(LS_R_REPEATS)] if method == "ls-r" else [seed]
            errs, times, cols, rows, status = [], [], [], [], "ok"
            for s in seeds:
                dec, elapsed = _timed(lambda: run_cur(X, method, k, k, rank_k, s, cfg))
                errs.append(relative_error(X, dec))
                times.append(elapsed)
                cols.append(dec.c)
                rows.append(dec.r)
                if dec.status != "ok":
                    status = dec.status
            curve.points.append(CurvePoint(
                method, k,
                float(np.mean(errs)), float(np.std(errs, ddof=1)) if len(errs) > 1 else 0.0,
                float(np.mean(times)), float(np.std(times, ddof=1)) if len(times) > 1 else 0.0,
                len(seeds), float(np.mean(cols)), float(np.mean(rows)), status,
            ))
    if with_svd:
        for k in grid:
            err, elapsed = _timed(lambda: svd_relative_error(X, k))
            curve.points.append(CurvePoint("svd", k, err, 0.0, elapsed, 0.0, 1,
                                           float(k), float(k)))
    return curve
