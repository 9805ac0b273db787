"""Watch the weight bisection that turns the sparse regression into exactly c columns.

    python demos/sf_selection_trace.py
"""
import numpy as np

from curkit import SfConfig, critical_lambda_cols, relative_error, sf_cur

rng = np.random.default_rng(3)
X = rng.normal(size=(40, 6)) @ rng.normal(size=(6, 25)) + 1e-3 * rng.normal(size=(40, 25))

lam_star = critical_lambda_cols(X)
print(f"smallest weight that zeroes every column: {lam_star:.4g}")

dec = sf_cur(X, c=6, r=8, cfg=SfConfig())
for axis in ("columns", "rows"):
    trace = dec.traces[axis]
    print(f"\n{axis}: target {trace.target}, status {trace.status}, "
          f"final solve {trace.final_solve}")
    for rec in trace.records:
        print(f"  lambda/lambda* = {rec.lam / trace.critical_lambda:9.6f} -> {rec.count} selected")

print("\nselected columns:", dec.col_indices.tolist())
print("selected rows:   ", dec.row_indices.tolist())
print(f"relative error:   {relative_error(X, dec):.3e}")
