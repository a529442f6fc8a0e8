"""
Sup deviation: rate in n and the effect of trimming
===================================================

The largest gap between an order statistic and its reference point shrinks
like log log n / (log n)^(1 - 1/p) for light-tailed laws.  For exponential
tails the extreme order statistics dominate the gap.
"""

from ostat import Exponential, Laplace, Normal, rate_scaling_experiment, trimmed_vs_full_experiment
from ostat.montecarlo import default_trim

# %%
# Median sup deviation for the normal law against the p = 2 rate.  The last
# column stays within a narrow range while n grows a hundredfold.
print(f"{'n':>8s} {'median':>8s} {'rate':>8s} {'ratio':>8s}")
for row in rate_scaling_experiment(Normal(), 2.0, [1000, 10_000, 100_000], trials=100, seed=0):
    print(f"{row.n:8d} {row.median_sup_dev:8.4f} {row.rate:8.4f} {row.ratio:8.4f}")

# %%
# Exponential tails: the untrimmed sup hardly moves with n, because the
# largest observation keeps fluctuating by O(1).  Dropping omega points at
# each end roughly halves it.
for n in (1000, 10_000, 100_000):
    w = default_trim(n)
    cmp = trimmed_vs_full_experiment(Exponential(), n, w, trials=100, seed=1)
    print(f"n={n:6d} omega={w}: full median {cmp.full.median:.3f}, "
          f"trimmed median {cmp.trimmed.median:.3f}")

# %%
# The same comparison for Laplace shows both tails contributing.
cmp = trimmed_vs_full_experiment(Laplace(), 10_000, 3, trials=200, seed=2)
print(f"Laplace n=10000: full q90 {cmp.full.q90:.3f}, trimmed q90 {cmp.trimmed.q90:.3f}")
