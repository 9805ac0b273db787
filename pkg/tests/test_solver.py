import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import curkit.sfcur
from curkit import ConfigurationError, SfConfig, SfProblem, apply_T, objective, solve
from curkit.sfcur import critical_lambda_cols, critical_lambda_rows, sf_cur
from curkit.solver import precompute, smooth_gradient


def test_objective_examples():
    X = np.random.default_rng(0).normal(size=(3, 4))
    p = SfProblem.columns(X, 1.7)
    assert objective(p, np.zeros((4, 3))) == pytest.approx(np.sum(X**2), rel=1e-15)
    assert objective(SfProblem.columns(np.eye(2), 0.0), np.eye(2)) == 0.0
    assert objective(SfProblem.columns([[2.0]], 4.0), [[0.5]]) == 2.0


def test_objective_row_problem_penalizes_columns():
    X = np.arange(6.0).reshape(2, 3)
    C = X[:, :2]
    p = SfProblem.rows(X, C, 1.0)
    W = np.array([[1.0, 0.0], [-3.0, 2.0]])  # c x m
    fit = np.sum((X - C @ W @ X) ** 2)
    assert objective(p, W) == pytest.approx(fit + 3.0 + 2.0)


@pytest.mark.parametrize("kind, expected", [("linf", 3.0 + 2.0), ("l1", 6.0), ("l2", np.sqrt(10) + 2.0)])
def test_penalty_kinds(kind, expected):
    W = np.array([[1.0, -3.0], [0.0, 2.0]])
    p = SfProblem(np.eye(2), np.eye(2), W, 1.0, penalty_kind=kind)
    assert objective(p, W) == pytest.approx(expected)


def test_shape_and_parameter_validation():
    with pytest.raises(ConfigurationError):
        SfProblem(np.eye(2), np.eye(3), np.eye(2), 1.0)
    with pytest.raises(ConfigurationError):
        SfProblem.columns(np.eye(2), -1.0)
    with pytest.raises(ConfigurationError):
        SfProblem(np.eye(2), np.eye(2), np.eye(2), 1.0, penalty_axis="diag")
    with pytest.raises(ConfigurationError):
        objective(SfProblem.columns(np.eye(2), 1.0), np.zeros((3, 2)))
    with pytest.raises(ConfigurationError):
        SfConfig(mu_scale=1.0)
    with pytest.raises(ConfigurationError):
        SfConfig(max_iter=0)


def test_explicit_mu_below_bound_rejected():
    X = np.diag([2.0, 1.0])
    with pytest.raises(ConfigurationError, match="mu"):
        solve(SfProblem.columns(X, 1.0, mu=16.0))
    state = solve(SfProblem.columns(X, 1.0, mu=16.5))
    assert state.mu == 16.5


def test_default_mu():
    X = np.diag([2.0, 1.0])
    assert solve(SfProblem.columns(X, 1.0)).mu == pytest.approx(1.01 * 16)


@pytest.mark.parametrize("axis", ["rows", "cols"])
def test_gradient_matches_finite_differences(axis):
    rng = np.random.default_rng(1)
    A, B, T = rng.normal(size=(3, 3)), rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    p = SfProblem(A, B, T, 0.0, penalty_axis=axis)
    W = rng.normal(size=(3, 3))
    G = smooth_gradient(p, W)
    h = 1e-6
    fd = np.zeros_like(W)
    for i in range(3):
        for j in range(3):
            E = np.zeros_like(W)
            E[i, j] = h
            fd[i, j] = (objective(p, W + E) - objective(p, W - E)) / (2 * h)
    np.testing.assert_allclose(G, fd, rtol=1e-6, atol=1e-6)


def test_row_problem_surrogate_uses_substituted_L():
    # L^T = mu Z + C^T X X^T - C^T C Z X X^T, then the prox (here identity)
    rng = np.random.default_rng(2)
    X = rng.normal(size=(4, 3))
    C = X[:, :2]
    p = SfProblem.rows(X, C, 0.0)
    Z = rng.normal(size=(2, 4))
    mu = 1.01 * (np.linalg.norm(C, 2) * np.linalg.norm(X, 2)) ** 2
    expected = (mu * Z + C.T @ X @ X.T - C.T @ C @ Z @ X @ X.T) / mu
    np.testing.assert_allclose(apply_T(p, Z), expected, rtol=1e-12, atol=1e-12)


def test_apply_T_identity_no_penalty():
    rng = np.random.default_rng(3)
    p = SfProblem.columns(np.eye(3), 0.0)
    Z = rng.normal(size=(3, 3))
    mu = 1.01
    np.testing.assert_allclose(apply_T(p, Z), Z + (np.eye(3) - Z) / mu, rtol=1e-14, atol=1e-15)


def test_apply_T_zero_at_critical_lambda():
    X = np.random.default_rng(4).normal(size=(5, 4))
    p = SfProblem.columns(X, critical_lambda_cols(X))
    assert not np.any(apply_T(p, np.zeros((4, 5))))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["linf", "l1", "l2"]),
       st.sampled_from(["rows", "cols"]), st.floats(0.0, 2.0))
def test_apply_T_nonexpansive(seed, kind, axis, frac):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(rng.integers(2, 6), rng.integers(2, 6)))
    left = X if axis == "rows" else X[:, : max(1, X.shape[1] // 2)]
    p = SfProblem(left, X, X, frac * np.sum(X**2), penalty_axis=axis, penalty_kind=kind)
    ops = precompute(p.left, p.right, p.target)
    for _ in range(5):
        Z1, Z2 = rng.normal(size=(2,) + p.W_shape)
        assert (np.linalg.norm(apply_T(p, Z1, ops) - apply_T(p, Z2, ops))
                <= np.linalg.norm(Z1 - Z2) * (1 + 1e-12))


def test_solve_identity_no_penalty():
    state = solve(SfProblem.columns(np.eye(2), 0.0), SfConfig(max_iter=5000, tol=1e-14))
    np.testing.assert_allclose(state.W, np.eye(2), atol=1e-10)
    assert state.objective < 1e-18


def test_solve_zero_at_critical_lambda_both_problems():
    rng = np.random.default_rng(5)
    for _ in range(20):
        X = rng.normal(size=(rng.integers(1, 9), rng.integers(1, 7)))
        assert not np.any(solve(SfProblem.columns(X, critical_lambda_cols(X))).W)
        C = X[:, :1]
        assert not np.any(solve(SfProblem.rows(X, C, critical_lambda_rows(X, C))).W)


def test_state_objective_matches_definition():
    X = np.random.default_rng(6).normal(size=(5, 4))
    p = SfProblem.columns(X, 0.2 * critical_lambda_cols(X))
    state = solve(p, SfConfig(max_iter=50))
    assert state.objective == pytest.approx(objective(p, state.W), rel=1e-10)
    assert len(state.objective_history) == state.iteration + 1
    assert state.objective_history[0] == pytest.approx(np.sum(X**2), rel=1e-12)


def test_asymptotic_regularity():
    X = np.random.default_rng(7).normal(size=(6, 5))
    p = SfProblem.columns(X, 0.3 * critical_lambda_cols(X))
    state = solve(p, SfConfig(max_iter=3000, tol=0))
    deltas = np.array(state.delta_history)
    # below this the step lengths are roundoff, not iteration dynamics
    floor = 1e-12 * np.linalg.norm(state.W)
    tail = deltas[deltas > floor][-10:]
    assert len(tail) == 10
    assert np.all(np.diff(tail) <= 0)
    assert deltas[-1] <= floor


def test_fixed_point_is_a_local_minimum():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(6, 5))
    p = SfProblem.columns(X, 0.3 * critical_lambda_cols(X))
    state = solve(p, SfConfig(max_iter=50_000, tol=1e-14))
    J = objective(p, state.W)
    for scale in (1e-3, 1e-2):
        for _ in range(25):
            H = rng.normal(size=state.W.shape)
            H *= scale / np.linalg.norm(H)
            assert J <= objective(p, state.W + H) + 1e-12 * J


def test_convergence_flag_and_cap():
    X = np.random.default_rng(9).normal(size=(4, 4))
    p = SfProblem.columns(X, 0.3 * critical_lambda_cols(X))
    capped = solve(p, SfConfig(max_iter=3, tol=0))
    assert capped.iteration == 3 and not capped.converged
    assert solve(p, SfConfig(max_iter=100_000, tol=1e-10)).converged


def test_warm_start_from_W0():
    X = np.random.default_rng(10).normal(size=(4, 3))
    p = SfProblem.columns(X, 0.3 * critical_lambda_cols(X))
    first = solve(p, SfConfig(max_iter=5000, tol=1e-13))
    again = solve(p, SfConfig(max_iter=5000, tol=1e-13), W0=first.W)
    assert again.iteration < first.iteration


def test_products_precomputed_once_per_problem(monkeypatch):
    calls = []
    original = curkit.sfcur.precompute

    def counting(*args, **kw):
        calls.append(args[0].shape)
        return original(*args, **kw)

    monkeypatch.setattr(curkit.sfcur, "precompute", counting)
    X = np.random.default_rng(11).normal(size=(6, 5))
    dec = sf_cur(X, 2, 2)
    # one cache for the column search, one for the row search, none per iteration
    assert len(calls) == 2
    assert dec.traces["columns"].iterations > 1


def test_curvature_factored_form_matches_gram_form():
    rng = np.random.default_rng(12)
    X = rng.normal(size=(3, 8))  # wide: X^T X is not cached
    ops = precompute(X, X, X)
    assert ops.left_gram is None and ops.right_gram is not None
    Z = rng.normal(size=(8, 3))
    np.testing.assert_allclose(ops.curvature(Z), X.T @ X @ Z @ X @ X.T, rtol=1e-12, atol=1e-12)
