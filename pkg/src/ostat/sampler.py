"""Sorted i.i.d. samples in linear time.

Uniform order statistics are generated as normalised partial sums of ``n + 1``
standard exponential variables,

    y_i = (z_1 + ... + z_i) / (z_1 + ... + z_{n+1}),

which has exactly the joint law of the sorted uniform sample.  General models
are obtained by pushing ``y`` through the (increasing) quantile function.
No sorting is involved, so a sample of size ``n`` costs O(n).

Random streams are counter based: trial ``k`` under master seed ``s`` uses a
Philox generator keyed by ``s`` with its counter offset by ``k`` in the
highest word, so streams never overlap and any trial can be regenerated on
its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DistributionModel, Uniform01
from .errors import DomainError

__all__ = [
    "SortedSample",
    "SeedSpec",
    "stream",
    "sample_uniform_order_stats",
    "sample_order_stats",
    "sort_oracle_sample",
    "empirical_cdf_at",
]

_U_MIN = np.nextafter(0.0, 1.0)
_U_MAX = np.nextafter(1.0, 0.0)
_SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class SortedSample:
    """Order statistics ``x_(1) <= ... <= x_(n)``."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < _SEED_LIMIT:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if int(self.trial_index) < 0:
            raise DomainError("trial_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        bitgen = np.random.Philox(key=int(self.master_seed),
                                  counter=[0, 0, 0, int(self.trial_index)])
        return np.random.Generator(bitgen)


def stream(master_seed: int, trial_index: int = 0) -> np.random.Generator:
    """Random generator for one trial; a pure function of its arguments."""
    return SeedSpec(master_seed, trial_index).generator()


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def _uniform_order_stats(n: int, rng: np.random.Generator) -> np.ndarray:
    # One buffer: uniforms -> exponentials (by inversion) -> partial sums.
    # 1 - U lies in (0, 1], so every exponential is finite.
    z = rng.random(n + 1)
    np.negative(z, out=z)
    np.log1p(z, out=z)
    np.negative(z, out=z)
    np.cumsum(z, out=z)
    y = z[:n]
    y /= z[n]
    # Zero-probability events that rounding can still produce.
    np.clip(y, _U_MIN, _U_MAX, out=y)
    return y


def sample_uniform_order_stats(n: int, rng: np.random.Generator) -> SortedSample:
    n = _check_n(n)
    return SortedSample(_uniform_order_stats(n, rng))


def sample_order_stats(model: DistributionModel, n: int,
                       rng: np.random.Generator) -> SortedSample:
    """Order statistics of ``n`` i.i.d. draws from ``model``.

    Uniform values of exactly 0 or 1 (possible only through rounding) are
    moved to the nearest interior float before inversion.
    """
    n = _check_n(n)
    gamma = _uniform_order_stats(n, rng)
    if isinstance(model, Uniform01):
        return SortedSample(gamma)
    return SortedSample(np.asarray(model.quantile(gamma), dtype=float))


def sort_oracle_sample(model: DistributionModel, n: int,
                       rng: np.random.Generator) -> SortedSample:
    """Reference sampler: ``n`` independent inversions, then a sort."""
    n = _check_n(n)
    u = np.clip(rng.random(n), _U_MIN, _U_MAX)
    x = np.asarray(model.quantile(u), dtype=float)
    return SortedSample(np.sort(np.atleast_1d(x)))


def empirical_cdf_at(sample, t):
    """Fraction of sample values ``<= t`` (right-continuous step function)."""
    values = np.asarray(sample, dtype=float)
    if values.size == 0:
        raise DomainError("empirical CDF of an empty sample")
    counts = np.searchsorted(values, t, side="right")
    return counts / values.size
