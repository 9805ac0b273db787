"""The proximal maps behind the group penalty, on small vectors.

prox_linf shrinks the largest magnitudes toward a common level and returns
exact zeros once the l1 norm of the input is within the threshold.

    python demos/prox_operators.py
"""
import numpy as np

from curkit import project_l1_ball, prox_l1, prox_l2, prox_linf

x = np.array([3.0, -1.0, 0.5])
print("x =", x)
for alpha in (0.0, 0.5, 1.0, 2.0, 4.0, 4.5):
    print(f"alpha={alpha:<4} linf {prox_linf(x, alpha)}  l1 {prox_l1(x, alpha)}  "
          f"l2 {np.round(prox_l2(x, alpha), 4)}")

# the linf prox and the l1-ball projection split x into two parts
alpha = 1.5
p, q = prox_linf(x, alpha), project_l1_ball(x, alpha)
print(f"\nalpha={alpha}: prox {p} + projection {q} = {p + q}")
