"""Comparison CUR methods: leverage scores (deterministic and sampled), DEIM,
pivoted QR, and the PCA-correlation feature selector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import CurDecomposition
from .errors import ConfigurationError, NumericalError
from .numerics import pivoted_qr, truncated_svd

__all__ = [
    "LeverageScores",
    "leverage_scores",
    "ls_deterministic_cur",
    "ls_randomized_cur",
    "deim_select",
    "deim_cur",
    "qr_select_columns",
    "qr_cur",
    "pca_correlation_select",
    "pca_correlation_scores",
    "top_k",
]

LS_R_MAX_DRAWS = 10


@dataclass
class LeverageScores:
    scores: np.ndarray
    k_param: int
    axis: str


def top_k(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores, ties resolved by lowest index."""
    return np.argsort(-np.asarray(scores), kind="stable")[:k]


def _check_counts(X, c=None, r=None):
    m, n = X.shape
    if c is not None and not 1 <= c <= n:
        raise ConfigurationError(f"c={c} outside [1, {n}]")
    if r is not None and not 1 <= r <= m:
        raise ConfigurationError(f"r={r} outside [1, {m}]")


def leverage_scores(X, k: int, axis: str = "cols") -> LeverageScores:
    """Normalized leverage scores from the leading ``k`` singular vectors.

    ``score_j = (1/k) * sum_t V[j, t]**2`` for columns (``U`` for rows).
    """
    X = np.asarray(X, dtype=float)
    if axis not in ("cols", "rows"):
        raise ConfigurationError(f"axis must be 'cols' or 'rows', got {axis!r}")
    svd = truncated_svd(X, k)
    basis = svd.V if axis == "cols" else svd.U
    return LeverageScores(np.einsum("ij,ij->i", basis, basis) / k, k, axis)


def _rank_param(X, k):
    if k is None:
        return min(10, min(X.shape))
    if not 1 <= k <= min(X.shape):
        raise ConfigurationError(f"rank parameter k={k} outside [1, {min(X.shape)}]")
    return k


def ls_deterministic_cur(X, c: int, r: int, k=None, rank_tol=None) -> CurDecomposition:
    """LS-D CUR: the ``c`` columns and ``r`` rows with largest leverage scores."""
    X = np.asarray(X, dtype=float)
    _check_counts(X, c, r)
    k = _rank_param(X, k)
    cols = top_k(leverage_scores(X, k, "cols").scores, c)
    rows = top_k(leverage_scores(X, k, "rows").scores, r)
    return CurDecomposition.from_indices(
        X, cols, rows, "ls-d", rank_tol, params={"c": c, "r": r, "k": k}
    )


def _bernoulli(rng, probs):
    return np.flatnonzero(rng.random(probs.size) < probs)


def ls_randomized_cur(X, c: int, r: int, k=None, seed: int = 0,
                      rank_tol=None) -> CurDecomposition:
    """LS-R CUR: include column ``j`` independently with probability ``min(1, c*score_j)``.

    The selected counts are random with expectation at most ``c`` (resp.
    ``r``).  An empty draw is repeated, up to 10 draws per side, before
    giving up with :class:`NumericalError`.  The same ``seed`` always
    reproduces the same decomposition.
    """
    X = np.asarray(X, dtype=float)
    _check_counts(X, c, r)
    k = _rank_param(X, k)
    rng = np.random.default_rng(seed)
    p_cols = np.minimum(1.0, c * leverage_scores(X, k, "cols").scores)
    p_rows = np.minimum(1.0, r * leverage_scores(X, k, "rows").scores)

    picks = []
    for what, probs in (("column", p_cols), ("row", p_rows)):
        for _ in range(LS_R_MAX_DRAWS):
            idx = _bernoulli(rng, probs)
            if idx.size:
                break
        else:
            raise NumericalError(f"LS-R drew no {what}s in {LS_R_MAX_DRAWS} attempts")
        picks.append(idx)

    return CurDecomposition.from_indices(
        X, picks[0], picks[1], "ls-r", rank_tol,
        params={"c": c, "r": r, "k": k, "seed": seed},
    )


def deim_select(V, k: int) -> np.ndarray:
    """DEIM point selection on the first ``k`` columns of an orthonormal ``V``.

    Greedily picks the row where the current basis vector's interpolation
    residual (against the points already chosen) is largest in magnitude.
    """
    V = np.asarray(V, dtype=float)
    if not 1 <= k <= V.shape[1]:
        raise ConfigurationError(f"k={k} outside [1, {V.shape[1]}]")
    picks = [int(np.argmax(np.abs(V[:, 0])))]
    for j in range(1, k):
        basis = V[:, :j]
        system = basis[picks]
        try:
            coeffs = np.linalg.solve(system, V[picks, j])
        except np.linalg.LinAlgError:
            raise NumericalError("singular DEIM interpolation system") from None
        resid = V[:, j] - basis @ coeffs
        # already-chosen points have zero residual up to roundoff
        resid[picks] = 0.0
        picks.append(int(np.argmax(np.abs(resid))))
    return np.asarray(picks, dtype=np.intp)


def deim_cur(X, k: int, rank_tol=None) -> CurDecomposition:
    """DEIM CUR with ``c = r = k`` from the leading ``k`` singular vectors."""
    X = np.asarray(X, dtype=float)
    if not 1 <= k <= min(X.shape):
        raise ConfigurationError(f"k={k} outside [1, {min(X.shape)}]")
    svd = truncated_svd(X, k)
    cols = deim_select(svd.V, k)
    rows = deim_select(svd.U, k)
    return CurDecomposition.from_indices(X, cols, rows, "deim", rank_tol, params={"k": k})


def qr_select_columns(X, c: int) -> np.ndarray:
    """First ``c`` pivots of column-pivoted QR."""
    X = np.asarray(X, dtype=float)
    return pivoted_qr(X, max_steps=c).pivot_order[:c]


def qr_cur(X, c: int, r: int, rank_tol=None) -> CurDecomposition:
    """QR CUR: columns from pivoted QR of ``X``, rows from pivoted QR of ``C.T``."""
    X = np.asarray(X, dtype=float)
    _check_counts(X, c, r)
    cols = qr_select_columns(X, c)
    rows = qr_select_columns(X[:, cols].T, r)
    return CurDecomposition.from_indices(X, cols, rows, "qr", rank_tol,
                                         params={"c": c, "r": r})


def _abs_corr(X, scores):
    Xc = X - X.mean(axis=0)
    s = scores - scores.mean()
    denom = np.linalg.norm(Xc, axis=0) * np.linalg.norm(s)
    num = np.abs(s @ Xc)
    out = np.zeros(X.shape[1])
    live = denom > 0
    out[live] = num[live] / denom[live]
    return out


def pca_correlation_scores(X) -> np.ndarray:
    """Per column, the larger |Pearson correlation| with the first two PC score vectors.

    ``X`` is expected to be row-centered already.  Zero-variance columns
    (and a missing second component) contribute correlation 0.
    """
    X = np.asarray(X, dtype=float)
    k = min(2, min(X.shape))
    svd = truncated_svd(X, k)
    pc_scores = svd.U * svd.S
    return np.max([_abs_corr(X, pc_scores[:, t]) for t in range(k)], axis=0)


def pca_correlation_select(X, c: int) -> np.ndarray:
    """Top ``c`` columns by :func:`pca_correlation_scores`, ties by lowest index."""
    X = np.asarray(X, dtype=float)
    if not 1 <= c <= X.shape[1]:
        raise ConfigurationError(f"c={c} outside [1, {X.shape[1]}]")
    return top_k(pca_correlation_scores(X), c)
