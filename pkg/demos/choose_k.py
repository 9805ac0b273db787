"""Choose the number of columns with AIC and BIC on a pairwise difference matrix.

Two groups of samples share three latent features.  Each row of the
difference matrix is one (group A, group B) pair.  When the differences are
exactly rank 3, three columns already reproduce the matrix and both criteria
stop there.  With independent noise on every entry each extra column still
removes a sizeable fraction of the residual, and the log-likelihood term
keeps outweighing the per-column penalty up to the full column set.

    python demos/choose_k.py
"""
import numpy as np

from curkit import auto_select_columns, difference_matrix

rng = np.random.default_rng(7)
basis = rng.normal(size=(3, 15))
A = rng.normal(size=(12, 3)) @ basis
B = rng.normal(size=(10, 3)) @ basis

for noise in (0.0, 0.05):
    D = difference_matrix(A + noise * rng.normal(size=A.shape),
                          B + noise * rng.normal(size=B.shape))
    print(f"\nnoise {noise}: difference matrix {D.shape}")
    for method in ("qr", "deim", "sf"):
        picks, scores = auto_select_columns(D, method, "both")
        print(f"  {method:>4}: AIC picks k={picks['aic'].params['k']}, "
              f"BIC picks k={picks['bic'].params['k']}")
    for s in scores[:5]:
        note = "" if s.feasible else f"  ({s.note})"
        print(f"    sf k={s.k}  residual {s.residual_sq:9.3g}  aic {s.aic:9.1f}  "
              f"bic {s.bic:9.1f}{note}")
