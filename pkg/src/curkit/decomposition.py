"""The CUR result container and the Frobenius-optimal link matrix."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import ConfigurationError
from .numerics import pseudoinverse

__all__ = ["CurDecomposition", "build_U", "check_indices"]


def check_indices(indices, size: int, what: str) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= size):
        raise ConfigurationError(f"{what} indices out of range [0, {size})")
    if np.unique(idx).size != idx.size:
        raise ConfigurationError(f"{what} indices are not unique")
    return idx


def build_U(X, col_indices, row_indices, rank_tol=None) -> np.ndarray:
    """``U = pinv(C) @ X @ pinv(R)`` with ``C = X[:, I_C]`` and ``R = X[I_R, :]``.

    This is the minimizer of ``||X - C U R||_F`` for the given C and R.
    """
    X = np.asarray(X, dtype=float)
    cols = check_indices(col_indices, X.shape[1], "column")
    rows = check_indices(row_indices, X.shape[0], "row")
    C = X[:, cols]
    R = X[rows, :]
    Cp = pseudoinverse(C, rank_tol)
    Rp = pseudoinverse(R, rank_tol)
    # contract the cheaper side first
    m, n = X.shape
    c, r = C.shape[1], R.shape[0]
    if c * m * n + c * n * r <= m * n * r + c * m * r:
        return (Cp @ X) @ Rp
    return Cp @ (X @ Rp)


@dataclass
class CurDecomposition:
    """Selected column/row indices of ``X`` and the link matrix ``U``.

    Indices are 0-based and kept in the order the method produced them
    (ranked for leverage/DEIM/QR, ascending for SF).
    """

    col_indices: np.ndarray
    row_indices: np.ndarray
    U: np.ndarray
    method: str
    params: dict = field(default_factory=dict)
    status: str = "ok"
    traces: Optional[dict] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.col_indices = np.asarray(self.col_indices, dtype=np.intp)
        self.row_indices = np.asarray(self.row_indices, dtype=np.intp)
        self.U = np.asarray(self.U, dtype=float)
        if self.U.shape != (self.col_indices.size, self.row_indices.size):
            raise ConfigurationError(
                f"U has shape {self.U.shape}, expected "
                f"({self.col_indices.size}, {self.row_indices.size})"
            )

    @property
    def c(self) -> int:
        return int(self.col_indices.size)

    @property
    def r(self) -> int:
        return int(self.row_indices.size)

    def C(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float)[:, self.col_indices]

    def R(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float)[self.row_indices, :]

    def reconstruct(self, X) -> np.ndarray:
        return self.C(X) @ self.U @ self.R(X)

    @classmethod
    def from_indices(cls, X, col_indices, row_indices, method, rank_tol=None, **kw):
        U = build_U(X, col_indices, row_indices, rank_tol)
        return cls(col_indices, row_indices, U, method, **kw)
