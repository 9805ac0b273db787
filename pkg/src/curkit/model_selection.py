"""Choosing the number of selected columns with AIC/BIC.

Candidates are scored with ``R = D`` (all rows kept), so the fit of a column
set ``C`` is ``||D - C C+ D||_F^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .baselines import (
    deim_select,
    leverage_scores,
    qr_select_columns,
    top_k,
)
from .decomposition import CurDecomposition, build_U
from .errors import ConfigurationError, CurError, NumericalError
from .numerics import truncated_svd
from .sfcur import select_columns
from .solver import SfConfig, precompute

__all__ = [
    "ModelScore",
    "difference_matrix",
    "aic_bic",
    "column_selector",
    "score_column_counts",
    "auto_select_columns",
    "AUTO_METHODS",
]

AUTO_METHODS = ("sf", "ls-d", "deim", "qr")


def difference_matrix(A, B) -> np.ndarray:
    """All pairwise differences ``A_i - B_j``, stacked with ``j`` varying fastest.

    With 1-based indices row ``j + b(i-1)`` holds ``A_i - B_j``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ConfigurationError(
            f"vector lengths differ: {A.shape[1]} vs {B.shape[1]}"
        )
    return (A[:, None, :] - B[None, :, :]).reshape(-1, A.shape[1])


@dataclass
class ModelScore:
    """Information criteria for one candidate column count ``k``.

    ``exact_fit`` marks a zero residual, for which both criteria are
    reported as ``-inf``.
    """

    k: int
    aic: float
    bic: float
    residual_sq: float
    exact_fit: bool = False
    feasible: bool = True
    selected: Optional[list] = None
    note: str = ""

    def as_row(self) -> dict:
        return {
            "k": self.k,
            "aic": self.aic,
            "bic": self.bic,
            "residual_sq": self.residual_sq,
            "exact_fit": self.exact_fit,
            "feasible": self.feasible,
            "note": self.note,
        }


def aic_bic(D_shape, c: int, residual_sq: float, k: Optional[int] = None) -> ModelScore:
    """AIC and BIC of a CUR model of an ``m x n`` matrix with ``c`` columns.

    ``AIC = 2(mc + 3) + nm ln(res / nm)`` and
    ``BIC = (mc + 3) ln(nm) + nm ln(res / nm)``.

    ``D_shape`` may be the matrix itself or its shape.
    """
    m, n = np.shape(D_shape) if np.ndim(D_shape) == 2 else tuple(D_shape)
    if m < 1 or n < 1 or c < 1:
        raise ConfigurationError("m, n and c must be positive")
    if residual_sq < 0:
        raise ConfigurationError("residual_sq must be non-negative")
    k = c if k is None else k
    params = m * c + 3
    nm = n * m
    if residual_sq == 0:
        return ModelScore(k, -math.inf, -math.inf, 0.0, exact_fit=True)
    fit = nm * math.log(residual_sq / nm)
    return ModelScore(k, 2 * params + fit, params * math.log(nm) + fit, float(residual_sq))


def column_selector(method: str, D, cfg: Optional[SfConfig] = None, rank_k: int = 2):
    """Return ``select(k) -> indices`` for one of :data:`AUTO_METHODS`.

    Expensive per-matrix work (SVD, leverage scores, a full pivoted QR) is
    done once here and shared by every ``k``.
    """
    D = np.asarray(D, dtype=float)
    if method == "sf":
        cfg = SfConfig() if cfg is None else cfg
        ops = precompute(D, D, D)
        return lambda k: select_columns(D, k, cfg, ops=ops)
    if method == "ls-d":
        scores = leverage_scores(D, min(rank_k, min(D.shape)), "cols").scores
        return lambda k: (top_k(scores, k), None)
    if method == "deim":
        V = truncated_svd(D, min(D.shape)).V

        def select(k):
            if k > V.shape[1]:
                raise ConfigurationError(f"DEIM needs k <= {V.shape[1]}")
            return deim_select(V, k), None

        return select
    if method == "qr":
        order = qr_select_columns(D, D.shape[1])
        return lambda k: (order[:k], None)
    raise ConfigurationError(
        f"automatic column count supports {', '.join(AUTO_METHODS)}, not {method!r}"
    )


def score_column_counts(D, method: str = "sf", cfg: Optional[SfConfig] = None,
                        rank_k: int = 2, ks=None, rank_tol=None):
    """Score every candidate column count ``k`` (default ``1..n``).

    Residuals at roundoff level are scored as exact fits.  Counts the
    method cannot deliver are kept in the curve with
    ``feasible=False`` and a note, and take no part in the selection.
    Returns the list of :class:`ModelScore` and a dict ``k -> indices``.
    """
    D = np.asarray(D, dtype=float)
    m, n = D.shape
    ks = range(1, n + 1) if ks is None else ks
    select = column_selector(method, D, cfg, rank_k)
    # residuals at roundoff level are exact fits; comparing their logs would
    # reward noise.  Truncated pseudoinverses of nearly dependent columns
    # measured up to ~14 * max(m, n) * eps * ||D||, hence the factor of 100.
    noise_floor = (100 * max(m, n) * np.finfo(float).eps * np.linalg.norm(D)) ** 2
    scores, chosen = [], {}
    for k in ks:
        try:
            idx, trace = select(k)
        except CurError as exc:
            scores.append(ModelScore(k, math.nan, math.nan, math.nan,
                                     feasible=False, note=str(exc)))
            continue
        if idx.size != k:
            scores.append(ModelScore(k, math.nan, math.nan, math.nan, feasible=False,
                                     note=f"method selected {idx.size} columns"))
            continue
        C = D[:, idx]
        resid = D - C @ build_U(D, idx, np.arange(m), rank_tol) @ D
        resid_sq = float(np.sum(resid * resid))
        score = aic_bic((m, n), k, 0.0 if resid_sq <= noise_floor else resid_sq)
        score.selected = idx.tolist()
        scores.append(score)
        chosen[k] = idx
    return scores, chosen


def auto_select_columns(D, method: str = "sf", criterion: str = "aic",
                        cfg: Optional[SfConfig] = None, rank_k: int = 2,
                        rank_tol=None):
    """Pick the column count minimizing AIC or BIC.

    Returns
    -------
    (CurDecomposition, list of ModelScore)
        The decomposition uses ``R = D`` and ``U = C+ D D+``.  With
        ``criterion="both"`` the first element is a dict keyed by criterion.
    """
    if criterion not in ("aic", "bic", "both"):
        raise ConfigurationError(f"criterion must be aic, bic or both, not {criterion!r}")
    D = np.asarray(D, dtype=float)
    scores, chosen = score_column_counts(D, method, cfg, rank_k, rank_tol=rank_tol)
    feasible = [s for s in scores if s.feasible]
    if not feasible:
        raise NumericalError(f"{method}: no column count was feasible")

    rows = np.arange(D.shape[0])
    picks = {}
    for crit in (("aic", "bic") if criterion == "both" else (criterion,)):
        # first minimum wins, so ties prefer fewer columns
        best = min(feasible, key=lambda s: (getattr(s, crit), s.k))
        idx = chosen[best.k]
        picks[crit] = CurDecomposition.from_indices(
            D, idx, rows, method, rank_tol,
            params={"criterion": crit, "k": best.k, "rank_k": rank_k},
        )
    if criterion == "both":
        return picks, scores
    return picks[criterion], scores
