"""Surrogate-functional iteration for group-sparse ``min ||T - A W B||_F^2 + penalty``.

The column-selection problem is ``A = B = T = X`` with the penalty on the
rows of ``W``; the row-selection problem is ``A = C``, ``B = T = X`` with the
penalty on the columns of ``W``.  Each step replaces the data-fit term by a
separable upper bound with curvature ``mu`` and minimizes it exactly with a
per-slice proximal operator, so the objective never increases as long as
``mu > ||A||_2^2 ||B||_2^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .numerics import spectral_norm
from .prox import PROX_ROWS

__all__ = [
    "SfConfig",
    "SfProblem",
    "SfOperators",
    "SfState",
    "precompute",
    "triple_product",
    "objective",
    "smooth_gradient",
    "apply_T",
    "solve",
    "penalty_value",
]

PENALTY_AXES = ("rows", "cols")
PENALTY_KINDS = tuple(PROX_ROWS)


@dataclass
class SfConfig:
    """Knobs for the inner solver and the bisection that drives it.

    The defaults follow the operating regime used inside bisection: a small
    iteration cap (20) with a relative step tolerance that only matters for
    standalone solves.
    """

    max_iter: int = 20
    tol: float = 1e-8
    mu: Optional[float] = None
    mu_scale: float = 1.01
    penalty: str = "linf"
    zero_threshold: float = 0.0
    bisection_max_iter: int = 60
    strict_count: bool = False
    final_max_iter: int = 500
    final_tol: float = 1e-10
    warm_start: bool = False
    rank_tol: Optional[float] = None
    record_history: bool = True

    def __post_init__(self):
        if self.max_iter < 1 or self.bisection_max_iter < 1 or self.final_max_iter < 0:
            raise ConfigurationError("iteration caps must be positive")
        if not self.tol >= 0 or not self.final_tol >= 0:
            raise ConfigurationError("tolerances must be non-negative")
        if not self.mu_scale > 1:
            raise ConfigurationError(f"mu_scale must exceed 1, got {self.mu_scale}")
        if self.penalty not in PENALTY_KINDS:
            raise ConfigurationError(f"unknown penalty {self.penalty!r}")
        if not self.zero_threshold >= 0:
            raise ConfigurationError("zero_threshold must be non-negative")

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SfProblem:
    """``min_W ||target - left @ W @ right||_F^2 + lam * sum(norm(slice))``.

    ``penalty_axis="rows"`` penalizes rows of ``W``; ``"cols"`` its columns.
    ``mu=None`` means the default ``mu_scale * ||left||^2 ||right||^2``.
    """

    left: np.ndarray
    right: np.ndarray
    target: np.ndarray
    lam: float
    mu: Optional[float] = None
    penalty_axis: str = "rows"
    penalty_kind: str = "linf"

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=float)
        self.right = np.asarray(self.right, dtype=float)
        self.target = np.asarray(self.target, dtype=float)
        if self.left.ndim != 2 or self.right.ndim != 2 or self.target.ndim != 2:
            raise ConfigurationError("left, right and target must be 2-D")
        if self.target.shape != (self.left.shape[0], self.right.shape[1]):
            raise ConfigurationError(
                f"target shape {self.target.shape} does not match "
                f"left {self.left.shape} / right {self.right.shape}"
            )
        if not self.lam >= 0:
            raise ConfigurationError(f"lambda must be non-negative, got {self.lam}")
        if self.penalty_axis not in PENALTY_AXES:
            raise ConfigurationError(f"unknown penalty axis {self.penalty_axis!r}")
        if self.penalty_kind not in PENALTY_KINDS:
            raise ConfigurationError(f"unknown penalty kind {self.penalty_kind!r}")

    @property
    def W_shape(self):
        return (self.left.shape[1], self.right.shape[0])

    @classmethod
    def columns(cls, X, lam, mu=None, penalty_kind="linf"):
        """Column selection: ``||X - X W X||^2 + lam * sum_i ||W[i, :]||``."""
        X = np.asarray(X, dtype=float)
        return cls(X, X, X, lam, mu, "rows", penalty_kind)

    @classmethod
    def rows(cls, X, C, lam, mu=None, penalty_kind="linf"):
        """Row selection: ``||X - C W X||^2 + lam * sum_j ||W[:, j]||``."""
        X = np.asarray(X, dtype=float)
        return cls(C, X, X, lam, mu, "cols", penalty_kind)


def triple_product(a, b, c) -> np.ndarray:
    """``a @ b @ c`` associated in the cheaper order."""
    p, q = a.shape
    s, t = c.shape
    left_first = p * q * s + p * s * t
    right_first = q * s * t + p * q * t
    if left_first <= right_first:
        return (a @ b) @ c
    return a @ (b @ c)


@dataclass
class SfOperators:
    """Products reused by every iteration (and every bisection step).

    Gram matrices are cached only when they are no larger than the factor
    they come from; otherwise the curvature term is applied in factored
    form, which is both cheaper and avoids an n-by-n array for wide inputs.
    """

    left: np.ndarray
    right: np.ndarray
    cross: np.ndarray  # left.T @ target @ right.T
    target_sq: float
    left_gram: Optional[np.ndarray]
    right_gram: Optional[np.ndarray]
    left_norm: float
    right_norm: float

    @property
    def mu_bound(self) -> float:
        return (self.left_norm * self.right_norm) ** 2

    def curvature(self, Z) -> np.ndarray:
        """``left.T @ left @ Z @ right @ right.T``."""
        if self.left_gram is not None:
            t = self.left_gram @ Z
        else:
            t = self.left.T @ (self.left @ Z)
        if self.right_gram is not None:
            return t @ self.right_gram
        return (t @ self.right) @ self.right.T


def precompute(left, right, target, right_gram=None, right_norm=None) -> SfOperators:
    """Build the per-problem cache; pass ``right_gram``/``right_norm`` to reuse them."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    target = np.asarray(target, dtype=float)
    left_gram = left.T @ left if left.shape[1] <= left.shape[0] else None
    if right_gram is None and right.shape[0] <= right.shape[1]:
        right_gram = right @ right.T
    return SfOperators(
        left=left,
        right=right,
        cross=triple_product(left.T, target, right.T),
        target_sq=float(np.sum(target * target)),
        left_gram=left_gram,
        right_gram=right_gram,
        left_norm=spectral_norm(left),
        right_norm=spectral_norm(right) if right_norm is None else float(right_norm),
    )


def _operators(p: SfProblem, ops):
    return precompute(p.left, p.right, p.target) if ops is None else ops


def resolve_mu(p: SfProblem, ops: SfOperators, mu_scale: float = 1.01) -> float:
    """The curvature constant, validated against the convergence bound."""
    bound = ops.mu_bound
    if p.mu is None:
        return mu_scale * bound if bound > 0 else 1.0
    if not p.mu > bound:
        raise ConfigurationError(
            f"mu={p.mu:.6g} must exceed ||left||^2 ||right||^2 = {bound:.6g}"
        )
    return float(p.mu)


def _slices(W, axis):
    return W if axis == "rows" else W.T


def penalty_value(W, axis: str, kind: str) -> float:
    S = np.abs(_slices(W, axis))
    if S.size == 0:
        return 0.0
    if kind == "linf":
        return float(S.max(axis=1).sum())
    if kind == "l1":
        return float(S.sum())
    return float(np.linalg.norm(S, axis=1).sum())


def _check_W(p: SfProblem, W):
    W = np.asarray(W, dtype=float)
    if W.shape != p.W_shape:
        raise ConfigurationError(f"W has shape {W.shape}, expected {p.W_shape}")
    return W


def objective(p: SfProblem, W) -> float:
    """Data-fit Frobenius term plus ``lam`` times the summed slice norms."""
    W = _check_W(p, W)
    resid = p.target - p.left @ W @ p.right
    return float(np.sum(resid * resid)) + p.lam * penalty_value(
        W, p.penalty_axis, p.penalty_kind
    )


def smooth_gradient(p: SfProblem, W) -> np.ndarray:
    """Gradient of the data-fit term, ``-2 A^T (T - A W B) B^T``."""
    W = _check_W(p, W)
    resid = p.target - p.left @ W @ p.right
    return -2.0 * p.left.T @ resid @ p.right.T


def _prox_step(p: SfProblem, Lt, mu):
    # prox of (lam/2mu)*norm at Lt/mu equals prox of (lam/2)*norm at Lt, scaled
    # by 1/mu (norms are positively homogeneous).  The unscaled form compares
    # slice norms against exactly lam/2, which makes W vanish bit-exactly at
    # the critical weight.
    prox = PROX_ROWS[p.penalty_kind]
    if p.penalty_axis == "rows":
        return prox(Lt, p.lam / 2.0) / mu
    return prox(Lt.T, p.lam / 2.0).T / mu


def apply_T(p: SfProblem, Z, ops: Optional[SfOperators] = None, mu_scale: float = 1.01):
    """One surrogate minimization: ``W = argmin_W J_hat(W, Z)``.

    Forms ``L^T = mu Z + A^T T B^T - A^T A Z B B^T`` and applies the proximal
    operator with threshold ``lam / (2 mu)`` to each penalized slice of
    ``L^T / mu``.
    """
    Z = _check_W(p, Z)
    ops = _operators(p, ops)
    mu = resolve_mu(p, ops, mu_scale)
    Lt = mu * Z + ops.cross - ops.curvature(Z)
    return _prox_step(p, Lt, mu)


@dataclass
class SfState:
    """Final iterate of :func:`solve` with its convergence record."""

    W: np.ndarray
    iteration: int
    objective: float
    delta: float
    converged: bool
    mu: float
    objective_history: list = field(default_factory=list)
    delta_history: list = field(default_factory=list)


def solve(
    p: SfProblem,
    cfg: Optional[SfConfig] = None,
    ops: Optional[SfOperators] = None,
    W0=None,
    max_iter: Optional[int] = None,
    tol: Optional[float] = None,
) -> SfState:
    """Iterate ``W_k = T(W_{k-1})`` from ``W0`` (zero by default).

    Stops when ``||W_k - W_{k-1}||_F <= tol * max(1, ||W_{k-1}||_F)`` or after
    ``max_iter`` steps (both default to ``cfg``).  With
    ``cfg.record_history`` the objective of every iterate, ``W0`` included,
    is kept in ``objective_history``.

    Raises
    ------
    ConfigurationError
        If an explicit ``mu`` does not exceed ``||A||_2^2 ||B||_2^2``.
    """
    cfg = SfConfig() if cfg is None else cfg
    ops = _operators(p, ops)
    mu = resolve_mu(p, ops, cfg.mu_scale)
    max_iter = cfg.max_iter if max_iter is None else max_iter
    tol = cfg.tol if tol is None else tol

    W = np.zeros(p.W_shape) if W0 is None else _check_W(p, W0).copy()
    objectives, deltas = [], []
    delta = np.inf
    converged = False
    k = 0
    for k in range(1, max_iter + 1):
        G = ops.curvature(W)
        if cfg.record_history:
            # ||T - AWB||^2 expanded through the cached products
            fit = ops.target_sq - 2.0 * np.vdot(W, ops.cross) + np.vdot(W, G)
            objectives.append(
                float(fit) + p.lam * penalty_value(W, p.penalty_axis, p.penalty_kind)
            )
        W_next = _prox_step(p, mu * W + ops.cross - G, mu)
        delta = float(np.linalg.norm(W_next - W))
        converged = delta <= tol * max(1.0, float(np.linalg.norm(W)))
        W = W_next
        deltas.append(delta)
        if converged:
            break

    final = objective(p, W)
    if cfg.record_history:
        objectives.append(final)
    return SfState(W, k, final, delta, converged, mu, objectives, deltas)
