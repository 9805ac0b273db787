import math

import numpy as np
import pytest

from curkit import (
    ConfigurationError,
    CountUnreachableError,
    SfConfig,
    SfProblem,
    relative_error,
    solve,
)
from curkit.decomposition import CurDecomposition, build_U
from curkit.sfcur import (
    critical_lambda_cols,
    critical_lambda_rows,
    nonzero_slices,
    select_columns,
    select_rows,
    sf_cur,
)


def test_critical_lambda_examples():
    assert critical_lambda_cols(np.eye(2)) == 2.0
    assert critical_lambda_cols(np.array([[2.0]])) == 16.0
    assert critical_lambda_cols(np.zeros((3, 2))) == 0.0
    assert critical_lambda_rows(np.eye(2), np.eye(2)) == 2.0
    assert critical_lambda_rows(np.zeros((3, 2)), np.zeros((3, 1))) == 0.0


def test_identity_zero_at_two_nonzero_at_one():
    cfg = SfConfig(max_iter=200)
    assert not np.any(solve(SfProblem.columns(np.eye(2), 2.0), cfg).W)
    assert np.any(solve(SfProblem.columns(np.eye(2), 1.0), cfg).W)


def test_critical_lambda_rows_random():
    X = np.random.default_rng(0).normal(size=(4, 3))
    C = X[:, :2]
    lam = critical_lambda_rows(X, C)
    assert lam == pytest.approx(2 * np.abs(C.T @ X @ X.T).sum(axis=0).max(), rel=1e-12)
    assert not np.any(solve(SfProblem.rows(X, C, lam)).W)


@pytest.mark.parametrize("penalty", ["l1", "l2"])
def test_critical_lambda_other_penalties(penalty):
    X = np.random.default_rng(1).normal(size=(5, 4))
    lam = critical_lambda_cols(X, penalty)
    cfg = SfConfig(penalty=penalty, max_iter=100)
    assert not np.any(solve(SfProblem.columns(X, lam, penalty_kind=penalty), cfg).W)
    assert np.any(solve(SfProblem.columns(X, 0.5 * lam, penalty_kind=penalty), cfg).W)


def test_nonzero_slices():
    W = np.array([[0.0, 0.0], [1e-9, 0.0], [0.0, -2.0]])
    assert nonzero_slices(W, "rows").tolist() == [1, 2]
    assert nonzero_slices(W, "rows", 1e-6).tolist() == [2]
    assert nonzero_slices(W, "cols").tolist() == [0, 1]


def test_select_all_columns():
    X = np.random.default_rng(2).normal(size=(5, 4))
    idx, trace = select_columns(X, 4)
    assert idx.tolist() == [0, 1, 2, 3]
    assert trace.status == "exact"


def test_dominant_column_survives_last():
    idx, trace = select_columns(np.diag([3.0, 2.0, 1.0]), 1)
    assert idx.tolist() == [0]
    assert trace.final_solve == "confirmed"


def test_counts_shrink_along_lambda_grid():
    X = np.random.default_rng(3).normal(size=(7, 6))
    lam_star = critical_lambda_cols(X)
    counts = []
    for frac in np.linspace(0, 1, 11):
        W = solve(SfProblem.columns(X, frac * lam_star), SfConfig(max_iter=5000, tol=1e-12)).W
        counts.append(nonzero_slices(W, "rows").size)
    assert counts[0] == 6 and counts[-1] == 0
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_select_rows_examples():
    X = np.eye(3)
    idx, _ = select_rows(X, X, 3)
    assert idx.tolist() == [0, 1, 2]
    Y = np.random.default_rng(4).normal(size=(5, 4))
    cols, _ = select_columns(Y, 2)
    rows, trace = select_rows(Y, Y[:, cols], 2)
    assert rows.size == 2 and trace.status == "exact"
    all_rows, _ = select_rows(Y, Y[:, cols], 5)
    assert all_rows.tolist() == [0, 1, 2, 3, 4]


def test_count_validation():
    X = np.ones((3, 2))
    with pytest.raises(ConfigurationError):
        select_columns(X, 3)
    with pytest.raises(ConfigurationError):
        select_rows(X, X, 0)
    with pytest.raises(ConfigurationError):
        sf_cur(X, 0, 1)


def test_bisection_trace_records_every_step():
    X = np.random.default_rng(5).normal(size=(8, 6))
    idx, trace = select_columns(X, 3)
    assert trace.iterations == len(trace.records) >= 1
    assert trace.records[-1].count == 3
    assert trace.accepted_lambda == trace.records[-1].lam
    assert 0 < trace.accepted_lambda < trace.critical_lambda
    d = trace.as_dict()
    assert d["iterations"] == trace.iterations and d["status"] == "exact"


def test_duplicate_columns_report_unreachable_counts():
    # two identical columns can only enter or leave together
    rng = np.random.default_rng(6)
    base = rng.normal(size=(6, 2))
    X = np.column_stack([base[:, 0], base[:, 0], base[:, 1]])
    statuses = {}
    for c in (1, 2, 3):
        dec = sf_cur(X, c, min(c, 6))
        statuses[c] = dec.status
    assert "count-mismatch" in statuses.values()
    with pytest.raises(CountUnreachableError):
        for c in (1, 2, 3):
            select_columns(X, c, SfConfig(strict_count=True))


def test_nearest_count_prefers_larger():
    X = np.column_stack([np.ones(4), np.ones(4)])
    idx, trace = select_columns(X, 1)
    assert trace.status == "nearest"
    assert idx.tolist() == [0, 1]


def test_identity_exact_reconstruction():
    dec = sf_cur(np.eye(3), 3, 3)
    assert dec.status == "ok"
    assert relative_error(np.eye(3), dec) == 0.0


def test_low_rank_reconstruction():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(8, 4)) @ rng.normal(size=(4, 6))
    dec = sf_cur(X, 4, 4)
    assert dec.status == "ok"
    assert relative_error(X, dec) <= 1e-6


def test_sf_cur_is_deterministic():
    X = np.random.default_rng(8).normal(size=(9, 7))
    a, b = sf_cur(X, 3, 4), sf_cur(X, 3, 4)
    assert a.col_indices.tolist() == b.col_indices.tolist()
    assert a.row_indices.tolist() == b.row_indices.tolist()
    assert a.U.tobytes() == b.U.tobytes()


def test_U_is_optimal_for_the_chosen_sets():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(8, 6))
    dec = sf_cur(X, 3, 3)
    C, R = dec.C(X), dec.R(X)
    best = np.linalg.norm(X - C @ dec.U @ R)
    for _ in range(20):
        V = dec.U + rng.normal(size=dec.U.shape) * rng.uniform(1e-4, 1)
        assert best <= np.linalg.norm(X - C @ V @ R)


def test_build_U_examples():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(3, 3))
    U = build_U(X, [0, 1, 2], [0, 1, 2])
    np.testing.assert_allclose(X @ U @ X, X, atol=1e-12)
    L = rng.normal(size=(4, 2)) @ rng.normal(size=(2, 5))
    U = build_U(L, [0, 3], [1, 2])
    err = np.linalg.norm(L - L[:, [0, 3]] @ U @ L[[1, 2]])
    assert err <= 1e-9 * np.linalg.norm(L)
    assert not np.any(build_U(np.zeros((3, 2)), [0], [1]))


def test_decomposition_validation():
    X = np.ones((3, 2))
    with pytest.raises(ConfigurationError):
        CurDecomposition.from_indices(X, [0, 0], [1], "x")
    with pytest.raises(ConfigurationError):
        CurDecomposition.from_indices(X, [2], [1], "x")
    dec = CurDecomposition.from_indices(X, [1], [0, 2], "x")
    assert dec.U.shape == (1, 2) and dec.c == 1 and dec.r == 2


def test_warm_start_option_runs():
    X = np.random.default_rng(11).normal(size=(6, 5))
    dec = sf_cur(X, 2, 2, SfConfig(warm_start=True))
    assert dec.col_indices.size == 2 or dec.status == "count-mismatch"


def test_row_count_uses_ceiling_split():
    # the rows analog of the critical weight on C = first ceil(n/2) columns
    rng = np.random.default_rng(12)
    X = rng.normal(size=(5, 5))
    C = X[:, : math.ceil(5 / 2)]
    lam = critical_lambda_rows(X, C)
    W = solve(SfProblem.rows(X, C, 0.999 * lam), SfConfig(max_iter=1)).W
    assert nonzero_slices(W, "cols").size == 1
