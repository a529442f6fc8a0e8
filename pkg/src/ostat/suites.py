"""Named verification suites.

Each suite runs one reproducible experiment and returns a JSON-ready dict
with a ``passed`` flag.  Defaults are the reference configurations; every
parameter can be overridden.  Reports contain no timing or worker
information, so they are byte-stable across runs and worker counts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .distributions import DistributionModel, Exponential, Normal, Uniform01
from .envelopes import additive_band, ratio_band
from .montecarlo import (CoverageReport, DeviationSummary, ExperimentConfig, TrialRecords,
                         rate_scaling_experiment, run_trials, trimmed_vs_full_experiment)
from .sampler import (sample_order_stats, sample_uniform_order_stats, sort_oracle_sample,
                      stream)
from .theta import metric_axiom_violations

__all__ = ["SUITES", "lemma1", "lemma2", "theorem2", "theorem4", "metric", "sampler", "run_suite"]


def _coverage_suite(model, band, trials, seed, workers):
    rec = run_trials(ExperimentConfig(model, band.n, trials, seed, band=band), workers)
    cov = CoverageReport.from_hits(rec.covered, band.nominal_coverage)
    dev = DeviationSummary.from_values(band.n, rec.sup_dev)
    return cov, dev, rec


def lemma2(model: DistributionModel | None = None, n: int = 2000, t: float = 0.1,
           trials: int = 5000, seed: int = 0, workers: int = 1, **_):
    """Additive band: pass iff coverage >= nominal - 3 Wilson half-widths."""
    model = model or Uniform01()
    band = additive_band(model, n, t)
    cov, dev, rec = _coverage_suite(model, band, trials, seed, workers)
    passed = cov.empirical_coverage >= cov.nominal - 3.0 * cov.half_width
    report = {"suite": "lemma2",
              "config": {"model": model.to_dict(), "n": n, "t": t, "trials": trials, "seed": seed},
              "coverage": cov.to_dict(), "deviation": dev.to_dict(), "passed": bool(passed)}
    return report, rec


def lemma1(model: DistributionModel | None = None, n: int = 100_000, T: float = 1e6,
           trials: int = 1000, seed: int = 0, workers: int = 1, **_):
    """Ratio band: pass iff coverage >= nominal ``1 - 400/sqrt(T)``."""
    model = model or Uniform01()
    band = ratio_band(model, n, T)
    cov, dev, rec = _coverage_suite(model, band, trials, seed, workers)
    passed = cov.empirical_coverage >= cov.nominal
    report = {"suite": "lemma1",
              "config": {"model": model.to_dict(), "n": n, "T": T, "trials": trials, "seed": seed},
              "coverage": cov.to_dict(), "deviation": dev.to_dict(), "passed": bool(passed)}
    return report, rec


def theorem2(model: DistributionModel | None = None, n: int = 10_000, omega: int = 3,
             trials: int = 500, seed: int = 0, workers: int = 1, **_):
    """Trimming the extreme indices lowers the 0.9-quantile of the sup deviation."""
    model = model or Exponential()
    cmp = trimmed_vs_full_experiment(model, n, omega, trials, seed, workers)
    q_trim = cmp.trimmed.quantile(0.9)
    q_full = cmp.full.quantile(0.9)
    inclusion = bool(np.all(cmp.trimmed.values <= cmp.full.values))
    report = {"suite": "theorem2",
              "config": {"model": model.to_dict(), "n": n, "omega": omega, "trials": trials, "seed": seed},
              "deviation": cmp.full.to_dict(), "trimmed_deviation": cmp.trimmed.to_dict(),
              "checks": {"trimmed_q90": q_trim, "full_q90": q_full, "per_trial_inclusion": inclusion},
              "passed": bool(q_trim < q_full and inclusion)}
    rec = TrialRecords(cmp.full.values, cmp.trimmed.values, None)
    return report, rec


def theorem4(model: DistributionModel | None = None, p: float = 2.0,
             n_list=(1000, 10_000, 100_000, 1_000_000), trials: int = 200, seed: int = 0,
             workers: int = 1, max_spread: float = 3.0, **_):
    """Median sup deviation decreases in n and tracks the log-concave rate."""
    model = model or Normal()
    rows = rate_scaling_experiment(model, p, n_list, trials, seed, workers)
    medians = [r.median_sup_dev for r in rows]
    ratios = [r.ratio for r in rows]
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    spread = max(ratios) / min(ratios)
    report = {"suite": "theorem4",
              "config": {"model": model.to_dict(), "p": p, "n_list": [int(n) for n in n_list],
                         "trials": trials, "seed": seed},
              "rows": [{"n": r.n, "median_sup_dev": r.median_sup_dev, "rate": r.rate,
                        "ratio": r.ratio} for r in rows],
              "checks": {"strictly_decreasing": decreasing, "ratio_spread": spread,
                         "max_spread": max_spread},
              "passed": bool(decreasing and spread <= max_spread)}
    return report, None


def metric(triples: int = 100_000, ps=(1.0, 1.5, 2.0, 4.0), seed: int = 0, rtol: float = 1e-12, **_):
    """Metric axioms of theta_p on random triples."""
    rng = stream(seed)
    x, y, z = rng.random((3, triples))
    # rng.random can return 0, which is outside the domain
    x, y, z = (np.where(a > 0, a, 0.5) for a in (x, y, z))
    results = {str(p): metric_axiom_violations(p, x, y, z, rtol) for p in ps}
    failures = sum(r["symmetry"] + r["identity"] + r["triangle"] for r in results.values())
    report = {"suite": "metric",
              "config": {"triples": triples, "ps": list(ps), "seed": seed, "rtol": rtol},
              "violations": results, "passed": failures == 0}
    return report, None


def beta_moment_check(n: int, indices, trials: int, seed: int):
    """Mean of uniform order statistics against the Beta(i, n+1-i) moments."""
    idx = np.asarray(indices) - 1
    acc = np.empty((trials, idx.size))
    for k in range(trials):
        acc[k] = sample_uniform_order_stats(n, stream(seed, k)).values[idx]
    rows = []
    for col, i in enumerate(indices):
        mean = i / (n + 1)
        var = i * (n + 1 - i) / ((n + 1) ** 2 * (n + 2))
        se = math.sqrt(var / trials)
        got = float(acc[:, col].mean())
        rows.append({"i": int(i), "mean": got, "expected": mean, "se": se,
                     "z": (got - mean) / se, "ok": abs(got - mean) <= 4 * se})
    return rows


def oracle_ks_check(model: DistributionModel, n: int, trials: int, seed: int, alpha: float = 1e-3):
    """Two-sample KS between the spacings sampler and the sort oracle at index n // 2."""
    i = n // 2 - 1
    a = np.array([sample_order_stats(model, n, stream(seed, k)).values[i] for k in range(trials)])
    b = np.array([sort_oracle_sample(model, n, stream(seed + 1, k)).values[i] for k in range(trials)])
    res = stats.ks_2samp(a, b)
    return {"index": i + 1, "statistic": float(res.statistic), "pvalue": float(res.pvalue),
            "alpha": alpha, "ok": bool(res.pvalue >= alpha)}


def sampler(model: DistributionModel | None = None, n: int = 1000,
            indices=(1, 100, 500, 900, 1000), trials: int = 20_000, ks_n: int = 100,
            ks_trials: int = 10_000, seed: int = 0, **_):
    model = model or Normal()
    moments = beta_moment_check(n, indices, trials, seed)
    ks = oracle_ks_check(model, ks_n, ks_trials, seed + 1)
    report = {"suite": "sampler",
              "config": {"model": model.to_dict(), "n": n, "indices": list(indices), "trials": trials,
                         "ks_n": ks_n, "ks_trials": ks_trials, "seed": seed},
              "beta_moments": moments, "ks": ks,
              "passed": bool(all(r["ok"] for r in moments) and ks["ok"])}
    return report, None


SUITES = {
    "lemma1": lemma1,
    "lemma2": lemma2,
    "theorem2": theorem2,
    "theorem4": theorem4,
    "metric": metric,
    "sampler": sampler,
}


def run_suite(name: str, **kwargs):
    return SUITES[name](**kwargs)
