"""
The theta_p metric and quantile moduli
======================================

theta_p measures distance between probabilities on a logarithmic scale in
each tail.  For a law with density proportional to exp(-|x|^p), the quantile
function is Lipschitz in theta_p, so the constants below stay finite as the
grid reaches further into the tails.
"""

import math

import numpy as np

from ostat import Grid, Normal, Laplace, Exponential, GenExp, theta_distance
from ostat import lipschitz_modulus, check_quantile_gap_bound, check_quantile_tail_bound
from ostat import check_central_lipschitz

print("theta_1(0.25, 0.5) =", theta_distance(1.0, 0.25, 0.5), " ln 2 =", math.log(2))
print("theta_2(e^-4, e^-1) =", theta_distance(2.0, math.exp(-4), math.exp(-1)))

# %%
# Deep in a tail theta_p is much larger than |x - y|.
for x in (1e-3, 1e-6, 1e-9):
    print(f"x={x:g}, y=2x: |x-y|={x:.1e}  theta_1={theta_distance(1.0, x, 2 * x):.3f}")

# %%
# Lipschitz constants, and how they react to grid refinement.
for model, p in [(Normal(), 2.0), (Laplace(), 1.0), (Exponential(), 1.0), (GenExp(3.0), 3.0)]:
    a = lipschitz_modulus(model, p).constant
    b = lipschitz_modulus(model, p, Grid().refined()).constant
    print(f"{model!r:32s} p={p:g}: {a:.4f} -> {b:.4f} after refinement")

# %%
# With p too large the constant is not finite: the estimate grows with the
# grid floor.  Laplace tails are only exponential.
for floor in (1e-4, 1e-8, 1e-12):
    u = np.geomspace(floor, 0.05, 60)
    worst = max(abs(math.log(y / x)) / theta_distance(2.0, x, y) for x in u for y in u if x < y)
    print(f"Laplace in theta_2, floor {floor:g}: {worst:.3f}")

# %%
# Other calibrated inequalities.  The gap inequality degenerates at the
# median of a symmetric law, where both quantile factors on the right vanish;
# restricting to pairs inside one tail gives a small constant.
for g in (Grid(), Grid().refined(), Grid().refined().refined()):
    full = check_quantile_gap_bound(Normal(), g).constant
    tail = check_quantile_gap_bound(Normal(), g, tail_mass=math.exp(-2)).constant
    print(f"gap bound, {g.tail_points} tail pts: full grid {full:.2f}, tails only {tail:.3f}")
print("tail bound c (normal):", round(check_quantile_tail_bound(Normal()).constant, 4))
for eps in (0.01, 0.05, 0.2, 0.45):
    print(f"central Lipschitz c at eps={eps}: {check_central_lipschitz(Normal(), eps).constant:.4f}")
