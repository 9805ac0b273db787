"""CUR through convex optimization: bisection on the regularization weight.

Columns are chosen as the nonzero rows of the column-problem solution, rows
as the nonzero columns of the row-problem solution built on the selected
``C``.  The weight is bisected on ``[0, lambda*]`` where ``lambda*`` is the
smallest weight whose solution is identically zero.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .decomposition import CurDecomposition, build_U
from .errors import ConfigurationError, CountUnreachableError
from .numerics import spectral_norm
from .prox import row_l1_norms
from .solver import SfConfig, SfProblem, precompute, solve, triple_product

__all__ = [
    "BisectionRecord",
    "BisectionTrace",
    "critical_lambda",
    "critical_lambda_cols",
    "critical_lambda_rows",
    "nonzero_slices",
    "select_columns",
    "select_rows",
    "sf_cur",
]

log = logging.getLogger(__name__)


def critical_lambda(cross, axis: str = "rows", penalty: str = "linf") -> float:
    """``2 * max`` dual norm over the penalized slices of ``A^T T B^T``.

    For the l-inf penalty the dual norm is l1; for l2 it is l2; for l1 it is
    the largest magnitude.
    """
    S = np.asarray(cross, dtype=float)
    S = S if axis == "rows" else S.T
    if S.size == 0:
        return 0.0
    if penalty == "linf":
        norms = row_l1_norms(S)
    elif penalty == "l2":
        norms = np.linalg.norm(S, axis=1)
    else:
        norms = np.abs(S).max(axis=1)
    return 2.0 * float(norms.max())


def critical_lambda_cols(X, penalty: str = "linf") -> float:
    """Smallest weight that zeroes the column problem: ``2 ||X^T X X^T||_inf``."""
    X = np.asarray(X, dtype=float)
    return critical_lambda(triple_product(X.T, X, X.T), "rows", penalty)


def critical_lambda_rows(X, C, penalty: str = "linf") -> float:
    """Smallest weight that zeroes the row problem: ``2 ||C^T X X^T||_1``."""
    X = np.asarray(X, dtype=float)
    C = np.asarray(C, dtype=float)
    return critical_lambda(triple_product(C.T, X, X.T), "cols", penalty)


def nonzero_slices(W, axis: str, zero_threshold: float = 0.0) -> np.ndarray:
    """Indices of rows (``axis="rows"``) or columns of ``W`` with max-abs above threshold."""
    W = np.abs(np.asarray(W))
    peak = W.max(axis=1) if axis == "rows" else W.max(axis=0)
    return np.flatnonzero(peak > zero_threshold)


@dataclass
class BisectionRecord:
    lam: float
    count: int
    iterations: int


@dataclass
class BisectionTrace:
    """Every weight tried, the count it produced, and how the search ended.

    ``status`` is ``"exact"`` when the requested count was hit and
    ``"nearest"`` when the closest achieved count was returned instead.
    ``final_solve`` records whether the tight re-solve at the accepted
    weight confirmed the index set (``"confirmed"``), disagreed and was
    discarded (``"mismatch"``), or was not run (``"skipped"``).
    """

    target: int
    critical_lambda: float
    records: list = field(default_factory=list)
    accepted_lambda: Optional[float] = None
    status: str = "exact"
    final_solve: str = "skipped"

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def counts(self) -> list:
        return [r.count for r in self.records]

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "critical_lambda": self.critical_lambda,
            "accepted_lambda": self.accepted_lambda,
            "status": self.status,
            "final_solve": self.final_solve,
            "iterations": self.iterations,
            "records": [
                {"lambda": r.lam, "count": r.count, "solver_iterations": r.iterations}
                for r in self.records
            ],
        }


def _bisect(make_problem, ops, lam_star, target, axis, cfg: SfConfig, what):
    trace = BisectionTrace(target=target, critical_lambda=lam_star)
    lo, hi = 0.0, lam_star
    best = None  # (distance, -count) key, indices, lambda
    W_prev = None

    for _ in range(cfg.bisection_max_iter):
        lam = 0.5 * (lo + hi)
        state = solve(make_problem(lam), cfg, ops, W0=W_prev if cfg.warm_start else None)
        idx = nonzero_slices(state.W, axis, cfg.zero_threshold)
        count = idx.size
        trace.records.append(BisectionRecord(lam, count, state.iteration))
        key = (abs(count - target), -count)
        if best is None or key < best[0]:
            best = (key, idx, lam)
        if cfg.warm_start:
            W_prev = state.W
        if count == target:
            break
        if count < target:
            hi = lam
        else:
            lo = lam
        if hi - lo <= 4 * np.finfo(float).eps * max(hi, np.finfo(float).tiny):
            break

    _, idx, lam = best
    trace.accepted_lambda = lam
    if idx.size != target:
        trace.status = "nearest"
        msg = (f"{what}: bisection reached {idx.size} instead of {target} "
               f"after {trace.iterations} steps")
        if cfg.strict_count:
            raise CountUnreachableError(msg)
        log.warning(msg)
        return idx, trace

    if cfg.final_max_iter > 0:
        state = solve(make_problem(lam), cfg, ops,
                      max_iter=cfg.final_max_iter, tol=cfg.final_tol)
        final_idx = nonzero_slices(state.W, axis, cfg.zero_threshold)
        if final_idx.size == target:
            trace.final_solve = "confirmed"
            idx = final_idx
        else:
            trace.final_solve = "mismatch"
            log.info("%s: tight re-solve selected %d, keeping bisection set",
                     what, final_idx.size)
    return idx, trace


def select_columns(X, c: int, cfg: Optional[SfConfig] = None, ops=None):
    """Pick exactly ``c`` columns of ``X`` by bisection on the column weight.

    Returns
    -------
    (indices, BisectionTrace)
        Ascending column indices.  When ``c`` cannot be reached the nearest
        achieved count (preferring the larger) is returned with
        ``trace.status == "nearest"``, unless ``cfg.strict_count`` is set, in
        which case :class:`CountUnreachableError` is raised.
    """
    cfg = SfConfig() if cfg is None else cfg
    X = np.asarray(X, dtype=float)
    if not 1 <= c <= X.shape[1]:
        raise ConfigurationError(f"c={c} outside [1, {X.shape[1]}]")
    if ops is None:
        ops = precompute(X, X, X)
    lam_star = critical_lambda(ops.cross, "rows", cfg.penalty)

    def make(lam):
        return SfProblem(X, X, X, lam, cfg.mu, "rows", cfg.penalty)

    return _bisect(make, ops, lam_star, c, "rows", cfg, "columns")


def select_rows(X, C, r: int, cfg: Optional[SfConfig] = None,
                right_gram=None, right_norm=None):
    """Pick exactly ``r`` rows of ``X`` given the selected columns ``C``.

    ``right_gram`` (``X @ X.T``) and ``right_norm`` (``||X||_2``) may be
    passed in to reuse work done for the column search.
    """
    cfg = SfConfig() if cfg is None else cfg
    X = np.asarray(X, dtype=float)
    C = np.asarray(C, dtype=float)
    if not 1 <= r <= X.shape[0]:
        raise ConfigurationError(f"r={r} outside [1, {X.shape[0]}]")
    if C.shape[0] != X.shape[0]:
        raise ConfigurationError("C must have as many rows as X")
    ops = precompute(C, X, X, right_gram=right_gram, right_norm=right_norm)
    lam_star = critical_lambda(ops.cross, "cols", cfg.penalty)

    def make(lam):
        return SfProblem(C, X, X, lam, cfg.mu, "cols", cfg.penalty)

    return _bisect(make, ops, lam_star, r, "cols", cfg, "rows")


def sf_cur(X, c: int, r: int, cfg: Optional[SfConfig] = None) -> CurDecomposition:
    """SF CUR: column bisection, then row bisection on ``C``, then ``U = C+ X R+``."""
    cfg = SfConfig() if cfg is None else cfg
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    if not 1 <= c <= n:
        raise ConfigurationError(f"c={c} outside [1, {n}]")
    if not 1 <= r <= m:
        raise ConfigurationError(f"r={r} outside [1, {m}]")

    col_ops = precompute(X, X, X)
    I_C, col_trace = select_columns(X, c, cfg, ops=col_ops)
    if I_C.size == 0:
        raise CountUnreachableError("column search selected no columns")
    C = X[:, I_C]
    I_R, row_trace = select_rows(
        X, C, r, cfg, right_gram=col_ops.right_gram, right_norm=col_ops.right_norm
    )
    if I_R.size == 0:
        raise CountUnreachableError("row search selected no rows")

    U = build_U(X, I_C, I_R, cfg.rank_tol)
    status = "ok" if col_trace.status == row_trace.status == "exact" else "count-mismatch"
    return CurDecomposition(
        I_C, I_R, U, "sf",
        params={"c": c, "r": r, **cfg.as_dict()},
        status=status,
        traces={"columns": col_trace, "rows": row_trace},
    )
