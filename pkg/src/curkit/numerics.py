"""Dense linear-algebra kernels: truncated SVD, pseudoinverse, pivoted QR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SvdResult",
    "PivotedQr",
    "truncated_svd",
    "spectral_norm",
    "pseudoinverse",
    "pivoted_qr",
    "default_rank_tol",
]


@dataclass
class SvdResult:
    """Leading singular triplets, ``m ~ U @ diag(S) @ V.T``."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.S) @ self.V.T


@dataclass
class PivotedQr:
    """``m[:, pivot_order[:k]] == Q @ R[:, :k]`` for the ``k = Q.shape[1]`` factored steps.

    ``R`` is stored for all columns in pivot order, so ``m[:, pivot_order] == Q @ R``
    whenever ``k = min(m.shape)`` steps were taken.
    """

    pivot_order: np.ndarray
    Q: np.ndarray
    R: np.ndarray


def _fix_signs(U, Vt):
    # make the largest-magnitude entry of every right singular vector positive
    idx = np.argmax(np.abs(Vt), axis=1)
    signs = np.sign(Vt[np.arange(Vt.shape[0]), idx])
    signs[signs == 0] = 1.0
    return U * signs, Vt * signs[:, None]


def truncated_svd(m, k: int) -> SvdResult:
    """Best rank-``k`` factors of ``m`` (LAPACK divide-and-conquer SVD).

    Singular vector signs are normalized so the largest-magnitude entry of
    each right singular vector is positive, making the output reproducible
    across platforms up to genuinely repeated singular values.
    """
    m = np.asarray(m, dtype=float)
    if not 1 <= k <= min(m.shape):
        raise ConfigurationError(f"rank k={k} outside [1, {min(m.shape)}]")
    U, S, Vt = np.linalg.svd(m, full_matrices=False)
    U, Vt = _fix_signs(U[:, :k], Vt[:k])
    return SvdResult(U, S[:k].copy(), Vt.T.copy())


def spectral_norm(m) -> float:
    """Largest singular value; 0 for empty or zero matrices."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def default_rank_tol(shape) -> float:
    return max(shape) * np.finfo(float).eps


def pseudoinverse(m, rank_tol=None) -> np.ndarray:
    """Moore-Penrose inverse via SVD.

    Singular values at or below ``rank_tol * sigma_max`` are treated as zero.
    The default ``rank_tol`` is ``max(m.shape) * eps``.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return np.zeros(m.shape[::-1])
    if rank_tol is None:
        rank_tol = default_rank_tol(m.shape)
    if rank_tol < 0:
        raise ConfigurationError("rank_tol must be non-negative")
    U, S, Vt = np.linalg.svd(m, full_matrices=False)
    keep = S > rank_tol * S[0]
    if not keep.any():
        return np.zeros(m.shape[::-1])
    return (Vt[keep].T / S[keep]) @ U[:, keep].T


def pivoted_qr(m, max_steps=None, tie_rtol: float = 1e-12) -> PivotedQr:
    """Householder QR with Businger-Golub column pivoting.

    At every step the remaining column with the largest residual norm is
    moved to the front.  Residual norms are recomputed from the updated
    matrix rather than downdated, so near-equal norms compare reliably;
    columns within ``tie_rtol`` of the maximum count as tied and the lowest
    original column index wins.

    Parameters
    ----------
    m : array_like, shape (rows, cols)
    max_steps : int, optional
        Stop after this many Householder steps (useful when only the first
        few pivots matter).  Defaults to ``min(rows, cols)``.

    Returns
    -------
    PivotedQr
        ``pivot_order`` is a full permutation of the column indices; columns
        not reached by a factorization step follow in original order.
    """
    A = np.array(m, dtype=float, copy=True)
    rows, cols = A.shape
    steps = min(rows, cols) if max_steps is None else min(max_steps, rows, cols)
    perm = np.arange(cols)
    Q = np.eye(rows)

    for k in range(steps):
        norms = np.einsum("ij,ij->j", A[k:, k:], A[k:, k:])
        top = norms.max()
        tied = np.flatnonzero(norms >= top * (1.0 - tie_rtol))
        j = k + tied[np.argmin(perm[k:][tied])]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]

        x = A[k:, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        alpha = -xnorm if x[0] >= 0 else xnorm
        v = x
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        A[k:, k:] -= 2.0 * np.outer(v, v @ A[k:, k:])
        A[k + 1:, k] = 0.0
        A[k, k] = alpha
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v)

    tail = np.sort(perm[steps:])
    order = np.concatenate([perm[:steps], tail])
    # re-align R's trailing columns with the sorted tail
    lookup = {c: i for i, c in enumerate(perm)}
    R = A[:steps, [lookup[c] for c in order]]
    return PivotedQr(order, Q[:, :steps], R)
