"""Order statistics of i.i.d. samples and the bands that hold them.

Linear-time sorted sampling, per-index envelopes around the population
quantiles ``F^-1(i / (n + 1))``, the theta_p metrics, and Monte Carlo
experiments that check the coverage and rate claims numerically.
"""

from .distributions import (Exponential, GenExp, Laplace, Normal, TailClass, Uniform01,
                            cdf, classify_tail, log_density, make_model, quantile)
from .envelopes import (Additive, Envelope, Ratio, SupLogConcave, SupUniformWidth,
                        additive_band, calibrate_constant, logconcave_rate, ratio_band,
                        reference_points, sup_band)
from .errors import ConfigurationError, DomainError, OstatError, PreconditionError
from .montecarlo import (ExperimentConfig, coverage_experiment, rate_scaling_experiment,
                         sup_deviation_experiment, trimmed_vs_full_experiment)
from .sampler import (SeedSpec, SortedSample, empirical_cdf_at, sample_order_stats,
                      sample_uniform_order_stats, sort_oracle_sample, stream)
from .theta import (Grid, ThetaParams, check_central_lipschitz, check_quantile_gap_bound,
                    check_quantile_tail_bound, continuity_table, lipschitz_modulus,
                    theta_distance)

__version__ = "0.1.0"
