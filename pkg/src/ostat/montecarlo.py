"""Reproducible Monte Carlo estimates of coverage and sup deviation.

Each trial draws one sorted sample with its own counter-based stream
``stream(seed, trial)``.  Trials are split into contiguous blocks that may be
run in worker processes; results are always reassembled in trial order, so
every report is bit-identical for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .distributions import DistributionModel
from .envelopes import Envelope, logconcave_rate, reference_points
from .errors import ConfigurationError, PreconditionError
from .sampler import sample_order_stats, stream

__all__ = [
    "ExperimentConfig",
    "TrialRecords",
    "CoverageReport",
    "DeviationSummary",
    "TrimComparison",
    "RateRow",
    "default_trim",
    "wilson_interval",
    "run_trials",
    "coverage_experiment",
    "sup_deviation_experiment",
    "trimmed_vs_full_experiment",
    "rate_scaling_experiment",
]

WILSON_LEVEL = 0.99


@dataclass(frozen=True)
class ExperimentConfig:
    model: DistributionModel
    n: int
    trials: int
    seed: int = 0
    band: Envelope | None = None
    trim: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.n < 1:
            raise ConfigurationError("n must be >= 1")
        if self.trim is not None and not 0 <= 2 * self.trim < self.n:
            raise ConfigurationError(f"trim must satisfy 0 <= 2*trim < n (n={self.n}, trim={self.trim})")
        if self.band is not None and self.band.n != self.n:
            raise ConfigurationError(f"band built for n={self.band.n} but experiment has n={self.n}")

    def index_range(self) -> tuple[int, int]:
        """0-based slice of the indices ``trim <= i <= n - trim`` (1-based)."""
        if self.trim is None:
            return 0, self.n
        return max(self.trim, 1) - 1, self.n - self.trim


def default_trim(n: int) -> int:
    """``ceil(log log n)``, a slowly growing trimming level."""
    return max(0, math.ceil(math.log(math.log(n))))


@dataclass
class TrialRecords:
    """Per-trial outcomes in trial order."""

    sup_dev: np.ndarray
    trimmed_sup_dev: np.ndarray | None = None
    covered: np.ndarray | None = None

    def records(self):
        for k in range(self.sup_dev.size):
            yield {
                "trial": k,
                "sup_dev": float(self.sup_dev[k]),
                "trimmed_sup_dev": None if self.trimmed_sup_dev is None else float(self.trimmed_sup_dev[k]),
                "covered": None if self.covered is None else bool(self.covered[k]),
            }


def _run_block(model, n, reference, lower, upper, lo, hi, trimmed, seed, start, stop):
    count = stop - start
    sup = np.empty(count)
    tsup = np.empty(count) if trimmed else None
    hit = np.empty(count, dtype=bool) if lower is not None else None
    for k in range(count):
        x = sample_order_stats(model, n, stream(seed, start + k)).values
        dev = np.abs(x - reference)
        sup[k] = dev.max()
        if trimmed:
            tsup[k] = dev[lo:hi].max()
        if hit is not None:
            xs = x[lo:hi]
            # closed intervals: boundary ties count as hits
            hit[k] = bool(np.all((lower[lo:hi] <= xs) & (xs <= upper[lo:hi])))
    return sup, tsup, hit


def _blocks(trials: int, workers: int):
    nblocks = min(trials, max(1, workers) * 4)
    edges = np.linspace(0, trials, nblocks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_trials(config: ExperimentConfig, workers: int = 1) -> TrialRecords:
    """Run every trial of ``config`` and return the per-trial outcomes."""
    reference = reference_points(config.model, config.n)
    lower = upper = None
    if config.band is not None:
        lower, upper = config.band.lower, config.band.upper
    lo, hi = config.index_range()
    trimmed = config.trim is not None
    args = (config.model, config.n, reference, lower, upper, lo, hi, trimmed, int(config.seed))
    blocks = _blocks(config.trials, workers)
    if workers <= 1:
        parts = [_run_block(*args, a, b) for a, b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, *args, a, b) for a, b in blocks]
            parts = [f.result() for f in futures]
    sup = np.concatenate([p[0] for p in parts])
    tsup = np.concatenate([p[1] for p in parts]) if trimmed else None
    hit = np.concatenate([p[2] for p in parts]) if lower is not None else None
    return TrialRecords(sup, tsup, hit)


def wilson_interval(hits: int, trials: int, level: float = WILSON_LEVEL) -> tuple[float, float]:
    z = stats.norm.ppf(0.5 + level / 2.0)
    phat = hits / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # at phat = 0 or 1 rounding can push an endpoint past phat
    lo = min(phat, max(0.0, centre - half))
    hi = max(phat, min(1.0, centre + half))
    return float(lo), float(hi)


@dataclass(frozen=True)
class CoverageReport:
    trials: int
    hits: int
    empirical_coverage: float
    wilson_interval: tuple[float, float]
    nominal: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.wilson_interval[1] - self.wilson_interval[0])

    @classmethod
    def from_hits(cls, covered: np.ndarray, nominal: float) -> "CoverageReport":
        trials = int(covered.size)
        hits = int(np.count_nonzero(covered))
        return cls(trials, hits, hits / trials, wilson_interval(hits, trials), float(nominal))

    def to_dict(self) -> dict:
        return {"trials": self.trials, "hits": self.hits, "empirical": self.empirical_coverage,
                "wilson99": list(self.wilson_interval), "nominal": self.nominal}


@dataclass(frozen=True)
class DeviationSummary:
    n: int
    trials: int
    median: float
    q90: float
    q99: float
    mean: float
    max: float
    values: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_values(cls, n: int, values: np.ndarray) -> "DeviationSummary":
        med, q90, q99 = np.quantile(values, [0.5, 0.9, 0.99])
        return cls(int(n), int(values.size), float(med), float(q90), float(q99),
                   float(values.mean()), float(values.max()), values)

    def quantile(self, level: float) -> float:
        return float(np.quantile(self.values, level))

    def to_dict(self) -> dict:
        return {"median": self.median, "q90": self.q90, "q99": self.q99,
                "mean": self.mean, "max": self.max}


def coverage_experiment(config: ExperimentConfig, workers: int = 1) -> CoverageReport:
    """Fraction of trials in which every order statistic in the index range is inside the band."""
    if config.band is None:
        raise ConfigurationError("coverage experiment needs a band")
    rec = run_trials(config, workers)
    return CoverageReport.from_hits(rec.covered, config.band.nominal_coverage)


def sup_deviation_experiment(config: ExperimentConfig, workers: int = 1) -> DeviationSummary:
    """Distribution of ``max_i |x_(i) - x*_(i)|``, over the trimmed range if ``trim`` is set."""
    rec = run_trials(config, workers)
    values = rec.sup_dev if config.trim is None else rec.trimmed_sup_dev
    return DeviationSummary.from_values(config.n, values)


@dataclass(frozen=True)
class TrimComparison:
    trimmed: DeviationSummary
    full: DeviationSummary
    omega: int


def trimmed_vs_full_experiment(model: DistributionModel, n: int, omega: int, trials: int,
                               seed: int = 0, workers: int = 1) -> TrimComparison:
    """Trimmed and full sup deviations computed from the same samples."""
    rec = run_trials(ExperimentConfig(model, n, trials, seed, trim=omega), workers)
    return TrimComparison(DeviationSummary.from_values(n, rec.trimmed_sup_dev),
                          DeviationSummary.from_values(n, rec.sup_dev), int(omega))


@dataclass(frozen=True)
class RateRow:
    n: int
    median_sup_dev: float
    rate: float
    ratio: float


def rate_scaling_experiment(model: DistributionModel, p: float, n_list, trials: int,
                            seed: int = 0, workers: int = 1) -> list[RateRow]:
    if model.p_index < p:
        raise PreconditionError(f"{model!r} is not {p:g}-log-concave")
    rows = []
    for n in n_list:
        rate = logconcave_rate(int(n), p)
        summary = sup_deviation_experiment(ExperimentConfig(model, int(n), trials, seed), workers)
        rows.append(RateRow(int(n), summary.median, rate, summary.median / rate))
    return rows
