"""Per-index envelopes for the order statistics of an i.i.d. sample.

An envelope assigns each index ``i`` an interval ``[lower_i, upper_i]``
around the reference point ``x*_i = F^-1(i / (n + 1))``, together with a
lower bound on the probability that all ``n`` order statistics fall inside
their intervals at once.

Band families:

* ``Ratio(T)``: ``gamma_(i)`` within a factor ``T`` of ``q = i/(n+1)`` and
  ``1 - gamma_(i)`` within a factor ``T`` of ``1 - q``; holds with
  probability at least ``1 - 400 / sqrt(T)``.
* ``Additive(t)``: ``|gamma_(i) - q| <= t``; probability at least
  ``1 - 2 exp(-n t^2 / 5)``.
* ``SupLogConcave(p, c)``: constant half-width ``c * log log n / (log n)^(1 - 1/p)``.
* ``SupUniformWidth(k, T)``: constant half-width ``k T``; probability at least
  ``1 - 400 / sqrt(T)``.

Uniform-space endpoints that reach 0 or 1 become ``-inf`` / ``+inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .distributions import DistributionModel
from .errors import ConfigurationError, DomainError, PreconditionError

__all__ = [
    "Ratio",
    "Additive",
    "SupLogConcave",
    "SupUniformWidth",
    "Envelope",
    "Calibration",
    "reference_points",
    "ratio_band",
    "additive_band",
    "logconcave_rate",
    "sup_band",
    "calibrate_constant",
]


@dataclass(frozen=True)
class Ratio:
    T: float


@dataclass(frozen=True)
class Additive:
    t: float


@dataclass(frozen=True)
class SupLogConcave:
    p: float
    c: float | None = None
    c_prob: float | None = None
    q: float | None = None


@dataclass(frozen=True)
class SupUniformWidth:
    k: float | None = None
    T: float | None = None


BandKind = Union[Ratio, Additive, SupLogConcave, SupUniformWidth]


@dataclass(frozen=True)
class Envelope:
    n: int
    lower: np.ndarray
    upper: np.ndarray
    reference: np.ndarray
    nominal_coverage: float
    kind: BandKind

    @property
    def q(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / (self.n + 1)

    def contains(self, x, lo: int = 0, hi: int | None = None) -> bool:
        """Whether every value of the sorted sample ``x[lo:hi]`` is inside its interval."""
        x = np.asarray(x)[lo:hi]
        return bool(np.all((self.lower[lo:hi] <= x) & (x <= self.upper[lo:hi])))


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def reference_points(model: DistributionModel, n: int) -> np.ndarray:
    """``F^-1(i / (n + 1))`` for ``i = 1..n``."""
    n = _check_n(n)
    q = np.arange(1, n + 1) / (n + 1)
    return np.atleast_1d(np.asarray(model.quantile(q), dtype=float))


def _map_to_data(model, lo_u, hi_u):
    lower = np.full(lo_u.shape, -np.inf)
    upper = np.full(hi_u.shape, np.inf)
    inner = lo_u > 0.0
    if np.any(inner):
        lower[inner] = model.quantile(lo_u[inner])
    inner = hi_u < 1.0
    if np.any(inner):
        upper[inner] = model.quantile(hi_u[inner])
    return lower, upper


def ratio_band(model: DistributionModel, n: int, T: float) -> Envelope:
    n = _check_n(n)
    if not T > 1.0:
        raise DomainError("ratio band requires T > 1")
    q = np.arange(1, n + 1) / (n + 1)
    r = 1.0 - q
    lo_u = np.maximum(q / T, 1.0 - r * T)
    hi_u = np.minimum(q * T, 1.0 - r / T)
    lower, upper = _map_to_data(model, lo_u, hi_u)
    nominal = max(0.0, 1.0 - 400.0 / math.sqrt(T))
    return Envelope(n, lower, upper, reference_points(model, n), nominal, Ratio(float(T)))


def additive_band(model: DistributionModel, n: int, t: float) -> Envelope:
    n = _check_n(n)
    if not 0.0 < t < 1.0:
        raise DomainError("additive band requires 0 < t < 1")
    q = np.arange(1, n + 1) / (n + 1)
    lower, upper = _map_to_data(model, q - t, q + t)
    nominal = max(0.0, 1.0 - 2.0 * math.exp(-n * t * t / 5.0))
    return Envelope(n, lower, upper, reference_points(model, n), nominal, Additive(float(t)))


def logconcave_rate(n: int, p: float) -> float:
    """``log log n / (log n) ** (1 - 1/p)`` with natural logarithms; needs ``n >= 16``."""
    if n < 16:
        raise DomainError("logconcave_rate needs n >= 16 so that log log n > 0")
    if not p >= 1.0:
        raise DomainError("p must be >= 1")
    ln = math.log(n)
    return math.log(ln) / ln ** (1.0 - 1.0 / p)


def sup_band(model: DistributionModel, n: int, kind: SupLogConcave | SupUniformWidth) -> Envelope:
    """Constant-width band around the reference points.

    For ``SupLogConcave`` the nominal coverage ``1 - c_prob (log n)^-q`` is
    only reported when both ``c_prob`` and ``q`` are known; otherwise it is 0,
    i.e. no guarantee is claimed.
    """
    n = _check_n(n)
    ref = reference_points(model, n)
    if isinstance(kind, SupLogConcave):
        if kind.c is None:
            raise ConfigurationError("SupLogConcave band needs a width constant c")
        half = kind.c * logconcave_rate(n, kind.p)
        nominal = 0.0
        if kind.c_prob is not None and kind.q is not None:
            nominal = min(1.0, max(0.0, 1.0 - kind.c_prob * math.log(n) ** (-kind.q)))
    elif isinstance(kind, SupUniformWidth):
        if kind.k is None or kind.T is None:
            raise ConfigurationError("SupUniformWidth band needs both k and T")
        half = kind.k * kind.T
        nominal = max(0.0, 1.0 - 400.0 / math.sqrt(kind.T))
    else:
        raise ConfigurationError(f"unsupported band kind {kind!r}")
    return Envelope(n, ref - half, ref + half, ref, nominal, kind)


@dataclass(frozen=True)
class Calibration:
    """Empirically calibrated width and probability constants.

    ``c`` is the ``target_quantile`` empirical quantile of the sup deviation
    divided by ``logconcave_rate(n_cal, p)``.  ``c_prob`` is the matching
    probability constant: the observed exceedance rate ``1 - target_quantile``
    times ``(log n_cal) ** q``.
    """

    c: float
    c_prob: float
    q: float
    p: float
    n_cal: int
    trials: int
    target_quantile: float
    master_seed: int

    def band_kind(self) -> SupLogConcave:
        return SupLogConcave(self.p, self.c, self.c_prob, self.q)


def calibrate_constant(model: DistributionModel, p: float, n_cal: int, trials: int,
                       target_quantile: float, seed: int = 0, q: float = 1.0,
                       workers: int = 1) -> Calibration:
    from .montecarlo import ExperimentConfig, run_trials

    if trials < 100:
        raise ConfigurationError("calibration needs at least 100 trials")
    if not 0.0 <= target_quantile <= 1.0:
        raise DomainError("target_quantile must lie in [0, 1]")
    if model.p_index < p:
        raise PreconditionError(f"{model!r} is not {p:g}-log-concave")
    rate = logconcave_rate(n_cal, p)
    records = run_trials(ExperimentConfig(model, n_cal, trials, seed), workers=workers)
    dev = np.quantile(records.sup_dev, target_quantile, method="higher")
    c = float(dev / rate)
    c_prob = (1.0 - target_quantile) * math.log(n_cal) ** q
    return Calibration(c, c_prob, q, float(p), int(n_cal), int(trials),
                       float(target_quantile), int(seed))
