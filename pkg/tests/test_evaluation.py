import numpy as np
import pytest

from curkit import ConfigurationError, DataError
from curkit.decomposition import CurDecomposition
from curkit.evaluation import (
    relative_error,
    run_cur,
    selection_report,
    separation_counts,
    svd_relative_error,
    sweep_error_curve,
)
from curkit.matrix_io import LabeledMatrix

# per-class counts of entries above 1 for the 15 probes of the gene-expression table
PROBE_COUNTS = [(45, 2), (48, 6), (48, 5), (2, 50), (48, 5), (47, 2), (46, 0), (44, 6),
                (43, 5), (44, 2), (38, 2), (46, 2), (47, 3), (39, 0), (39, 0)]


def synthetic_probe_matrix(counts, n_a=49, n_b=58, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2, 1, size=(n_a + n_b, len(counts)))
    for j, (a, b) in enumerate(counts):
        X[rng.choice(n_a, a, replace=False), j] = rng.uniform(1.01, 3, a)
        X[n_a + rng.choice(n_b, b, replace=False), j] = rng.uniform(1.01, 3, b)
    classes = ["normal"] * n_a + ["tumor"] * n_b
    return LabeledMatrix(X, class_of_row=classes,
                         col_labels=[f"p{j}" for j in range(len(counts))])


def test_relative_error_examples():
    X = np.random.default_rng(0).normal(size=(4, 3))
    full = CurDecomposition.from_indices(X, [0, 1, 2], [0, 1, 2, 3], "x")
    assert relative_error(X, full) < 1e-14
    zero_U = CurDecomposition([0], [0], np.zeros((1, 1)), "x")
    assert relative_error(X, zero_U) == 1.0
    L = np.random.default_rng(1).normal(size=(5, 2)) @ np.random.default_rng(2).normal(size=(2, 4))
    assert relative_error(L, run_cur(L, "qr", 2, 2)) <= 1e-9
    with pytest.raises(DataError):
        relative_error(np.zeros((2, 2)), zero_U)


def test_separation_counts_examples():
    lm = LabeledMatrix([[2.0], [0.0], [2.0], [2.0]], class_of_row=list("AABB"))
    assert separation_counts(lm, 0) == (1, 2)
    flat = LabeledMatrix([[1.0], [0.5], [1.0], [-3.0]], class_of_row=list("AABB"))
    assert separation_counts(flat, 0) == (0, 0)


def test_separation_needs_two_classes():
    with pytest.raises(DataError):
        separation_counts(LabeledMatrix([[1.0], [2.0]]), 0)
    with pytest.raises(DataError):
        separation_counts(LabeledMatrix([[1.0], [2.0], [3.0]], class_of_row=list("ABC")), 0)


def test_report_reproduces_probe_table_statistics():
    lm = synthetic_probe_matrix(PROBE_COUNTS)
    rep = selection_report(lm, range(15))
    assert [(a, b) for a, b, _ in rep.per_feature] == PROBE_COUNTS
    assert rep.median_diff == 43
    assert rep.mean_diff == 42
    assert round(rep.std_diff, 2) == 3.36
    # the population estimator does not match the published value
    assert round(selection_report(lm, range(15), ddof=0).std_diff, 2) != 3.36


def test_report_statistics_match_sort_based_median():
    rng = np.random.default_rng(3)
    counts = [tuple(int(v) for v in rng.integers(0, 40, 2)) for _ in range(9)]
    lm = synthetic_probe_matrix(counts, 45, 45, seed=4)
    rep = selection_report(lm, range(9))
    diffs = sorted(abs(a - b) for a, b in counts)
    assert rep.median_diff == diffs[len(diffs) // 2]
    assert rep.mean_diff == pytest.approx(sum(diffs) / 9, rel=1e-15)


def test_report_small_selections():
    lm = synthetic_probe_matrix([(45, 2), (1, 2), (3, 5), (9, 6)], seed=5)
    one = selection_report(lm, [0])
    assert one.median_diff == one.mean_diff == 43
    assert one.std_diff == 0 and not one.std_defined
    three = selection_report(lm, [1, 2, 3])
    assert three.median_diff == 2 and three.mean_diff == 2
    assert three.labels == ["p1", "p2", "p3"]
    with pytest.raises(DataError):
        selection_report(lm, [])


def test_svd_error_is_best():
    X = np.random.default_rng(6).normal(size=(8, 6))
    assert svd_relative_error(X, 6) < 1e-14
    for method in ("sf", "ls-d", "deim", "qr"):
        assert svd_relative_error(X, 3) <= relative_error(X, run_cur(X, method, 3, 3))


def test_run_cur_validation():
    X = np.eye(4)
    with pytest.raises(ConfigurationError):
        run_cur(X, "deim", 2, 3)
    with pytest.raises(ConfigurationError):
        run_cur(X, "nmf", 2, 2)


def test_sweep_curves():
    X = np.random.default_rng(7).normal(size=(4, 4))
    curve = sweep_error_curve(X, ["qr", "ls-r", "deim"], [1, 2, 3], seed=3)
    for method in ("qr", "ls-r", "deim", "svd"):
        assert [p.k for p in curve.for_method(method)] == [1, 2, 3]
    lsr = curve.for_method("ls-r")
    assert all(p.runs == 5 for p in lsr)
    assert any(p.relative_error_std > 0 for p in lsr)
    assert all(p.runs == 1 and p.relative_error_std == 0 for p in curve.for_method("qr"))
    assert not sweep_error_curve(X, ["qr"], [2], with_svd=False).for_method("svd")


def test_sweep_exact_at_rank():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(9, 3)) @ rng.normal(size=(3, 7))
    curve = sweep_error_curve(X, ["sf", "ls-d", "deim", "qr"], [3])
    for p in curve.points:
        if p.method != "sf" or p.status == "ok":
            assert p.relative_error <= 1e-8, p.method


def test_sweep_validation():
    X = np.eye(3)
    with pytest.raises(ConfigurationError):
        sweep_error_curve(X, ["qr"], [4])
    with pytest.raises(ConfigurationError):
        sweep_error_curve(X, ["pca"], [1])


def test_curve_csv_files(tmp_path):
    X = np.random.default_rng(9).normal(size=(5, 4))
    curve = sweep_error_curve(X, ["qr"], [1, 2])
    curve.write_error_csv(tmp_path / "e.csv")
    curve.write_timing_csv(tmp_path / "t.csv")
    err = (tmp_path / "e.csv").read_text().splitlines()
    assert err[0].startswith("schema_version,method,k,relative_error")
    assert len(err) == 1 + 4  # qr and svd at two grid points
    assert (tmp_path / "t.csv").read_text().splitlines()[0].split(",")[3] == "wall_time"
