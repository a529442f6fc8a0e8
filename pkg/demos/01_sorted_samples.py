"""
Sorted samples without sorting
==============================

Partial sums of n + 1 standard exponentials, divided by their total, have
the joint law of the sorted uniform sample.  Pushing them through a
quantile function gives sorted draws from any continuous law.
"""

import time

import numpy as np
from scipy import stats

from ostat import Normal, Exponential, sample_order_stats, sort_oracle_sample, stream
from ostat import empirical_cdf_at

# %%
# One sorted normal sample of size 10, reproducible from (seed, trial).
seed = 2024
x = sample_order_stats(Normal(), 10, stream(seed, 0))
print("sorted normal sample:", np.round(x.values, 3))

# %%
# The same marginal law as the naive draw-then-sort route.
n, trials = 100, 5000
a = [sample_order_stats(Exponential(), n, stream(seed, k)).values[n // 2 - 1] for k in range(trials)]
b = [sort_oracle_sample(Exponential(), n, stream(seed + 1, k)).values[n // 2 - 1] for k in range(trials)]
print(f"median order statistic, spacings vs sort: KS p-value = {stats.ks_2samp(a, b).pvalue:.3f}")

# %%
# Cost is linear in n: doubling n roughly doubles the time.
for m in (1_000_000, 2_000_000, 4_000_000):
    rng = stream(seed, 1)
    t0 = time.perf_counter()
    sample_order_stats(Normal(), m, rng)
    print(f"n = {m:>9,d}: {time.perf_counter() - t0:.3f} s")

# %%
# The empirical CDF of a large sample sits close to the normal CDF.
big = sample_order_stats(Normal(), 100_000, stream(seed, 2))
grid = np.linspace(-3, 3, 7)
for t, fn in zip(grid, empirical_cdf_at(big, grid)):
    print(f"F_n({t:+.1f}) = {fn:.4f}   Phi = {stats.norm.cdf(t):.4f}")
