"""Select features from labelled samples and score how well they split the classes.

Each feature is counted per class for entries above a threshold; a good
feature has a large gap between the two counts.

    python demos/class_separation.py
"""
import numpy as np

from curkit import (
    LabeledMatrix,
    deim_select,
    mean_center_rows,
    min_max_normalize_cols,
    pca_correlation_select,
    selection_report,
    truncated_svd,
)
from curkit.sfcur import select_columns

rng = np.random.default_rng(11)
n_a, n_b, n_feat = 30, 35, 40
X = rng.normal(size=(n_a + n_b, n_feat))
X[n_a:, :5] += 2.5  # the first five features are raised in class b
X = mean_center_rows(X)
classes = ["a"] * n_a + ["b"] * n_b

scaled = min_max_normalize_cols(X)
# entries above 0.5 of each feature's range count as "high"
lm = LabeledMatrix(scaled, class_of_row=classes, col_labels=[f"f{j}" for j in range(n_feat)])

k = 5
picks = {
    "sf": select_columns(X, k)[0],
    "deim": deim_select(truncated_svd(X, k).V, k),
    "pca": pca_correlation_select(X, k),
}
for name, idx in picks.items():
    rep = selection_report(lm, idx, threshold=0.5)
    print(f"{name:>4}: {rep.labels}  median gap {rep.median_diff}, "
          f"mean {rep.mean_diff:.1f}, sd {rep.std_diff:.2f}")
