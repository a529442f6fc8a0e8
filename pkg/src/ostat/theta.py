"""The theta_p metrics on (0, 1) and grid estimates of quantile-function moduli.

For ``1 <= p < inf`` and ``0 < x <= y < 1``::

    theta_p(x, y) = max(log(y / x) / log(1/x) ** (1 - 1/p),
                        log((1 - x) / (1 - y)) / log(1/(1 - y)) ** (1 - 1/p))

The quantile function of a p-log-concave law is Lipschitz in ``theta_p``.
The functions below estimate such constants as suprema over finite grids of
probabilities.  Grids are nested under ``Grid.refined`` so a supremum can
only grow when the grid is refined.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import DistributionModel, TailClass
from .errors import DomainError, PreconditionError

__all__ = [
    "ThetaParams",
    "Grid",
    "ModulusKind",
    "ModulusEstimate",
    "BoundCheck",
    "theta_distance",
    "metric_axiom_violations",
    "lipschitz_modulus",
    "continuity_table",
    "check_quantile_gap_bound",
    "check_quantile_tail_bound",
    "check_central_lipschitz",
]


@dataclass(frozen=True)
class ThetaParams:
    p: float = 1.0

    def __post_init__(self):
        if not (self.p >= 1.0 and math.isfinite(self.p)):
            raise DomainError("theta_p is defined for 1 <= p < inf")


def _as_p(params) -> float:
    if isinstance(params, ThetaParams):
        return float(params.p)
    return float(ThetaParams(float(params)).p)


def theta_distance(params, x, y):
    """theta_p distance; arguments may be given in either order.

    ``params`` is a ``ThetaParams`` or a bare exponent ``p``.
    """
    p = _as_p(params)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all((x > 0) & (x < 1)) and np.all((y > 0) & (y < 1))):
        raise DomainError("theta_p arguments must lie in (0, 1)")
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    gap = hi - lo
    expo = 1.0 - 1.0 / p
    left = np.log1p(gap / lo)
    right = np.log1p(gap / (1.0 - hi))
    if expo > 0.0:
        left = left / (-np.log(lo)) ** expo
        right = right / (-np.log1p(-hi)) ** expo
    d = np.maximum(left, right)
    return d[()] if d.ndim == 0 else d


def metric_axiom_violations(p: float, x, y, z, rtol: float = 1e-12) -> dict:
    """Count failures of the metric axioms of theta_p on triples ``(x, y, z)``."""
    dxy = theta_distance(p, x, y)
    dyx = theta_distance(p, y, x)
    dyz = theta_distance(p, y, z)
    dxz = theta_distance(p, x, z)
    x = np.asarray(x)
    y = np.asarray(y)
    identity = ((dxy == 0) != (x == y)) | (theta_distance(p, x, x) != 0)
    return {
        "symmetry": int(np.count_nonzero(dxy != dyx)),
        "identity": int(np.count_nonzero(identity)),
        "triangle": int(np.count_nonzero(dxz > (dxy + dyz) * (1.0 + rtol))),
        "triples": int(np.size(dxy)),
    }


@dataclass(frozen=True)
class Grid:
    """Probability grid: geometric points in each tail plus a uniform centre.

    Left-tail points are ``geomspace(floor, tail_edge, tail_points)``, the
    right tail mirrors them through ``u -> 1 - u`` and the centre is
    ``linspace(tail_edge, 1 - tail_edge, central_points)``.
    """

    floor: float = 1e-12
    tail_points: int = 64
    central_points: int = 64
    tail_edge: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.floor <= self.tail_edge <= 0.5:
            raise DomainError("grid needs 0 < floor <= tail_edge <= 1/2")

    def points(self) -> np.ndarray:
        parts = []
        if self.tail_points > 0:
            tail = np.geomspace(self.floor, self.tail_edge, self.tail_points)
            parts += [tail, 1.0 - tail]
        if self.central_points > 0:
            parts.append(np.linspace(self.tail_edge, 1.0 - self.tail_edge, self.central_points))
        return np.unique(np.concatenate(parts))

    def refined(self) -> "Grid":
        """Grid with every gap halved; contains all points of ``self``."""
        def dbl(k):
            return 2 * k - 1 if k > 1 else k
        return replace(self, tail_points=dbl(self.tail_points),
                       central_points=dbl(self.central_points))

    def describe(self) -> str:
        return (f"{self.tail_points} geometric points per tail on [{self.floor:g}, "
                f"{self.tail_edge:g}], {self.central_points} uniform central points")


def _pairs(u: np.ndarray):
    i, j = np.triu_indices(u.size, k=1)
    return i, j


class ModulusKind(enum.Enum):
    LIPSCHITZ = "lipschitz"
    UNIFORM_CONTINUITY_TABLE = "uniform_continuity_table"


@dataclass(frozen=True)
class ModulusEstimate:
    constant: float
    grid: Grid
    kind: ModulusKind
    argmax: tuple = ()
    table: tuple = ()

    @property
    def grid_spec(self) -> str:
        return self.grid.describe()


@dataclass(frozen=True)
class BoundCheck:
    """Smallest constant making an inequality hold on every grid pair.

    ``violations`` lists pairs that fail at ``constant``; it is empty unless
    something is numerically wrong.
    """

    constant: float
    argmax: tuple
    grid: Grid
    n_pairs: int
    violations: list = field(default_factory=list)


def _sup(lhs, rhs, x, y, grid, rtol=1e-12) -> BoundCheck:
    keep = rhs > 0
    lhs, rhs, x, y = lhs[keep], rhs[keep], x[keep], y[keep]
    ratio = lhs / rhs
    k = int(np.argmax(ratio))
    c = float(ratio[k])
    bad = lhs > c * rhs * (1.0 + rtol)
    violations = list(zip(x[bad].tolist(), y[bad].tolist()))
    return BoundCheck(c, (float(x[k]), float(y[k])), grid, int(lhs.size), violations)


def lipschitz_modulus(model: DistributionModel, params, grid: Grid | None = None) -> ModulusEstimate:
    """Grid supremum of ``|F^-1(x) - F^-1(y)| / theta_p(x, y)``.

    Requires ``model.p_index >= p``; for lighter p the ratio is unbounded.
    """
    p = _as_p(params)
    if model.p_index < p:
        raise PreconditionError(
            f"{model!r} is only {model.p_index:g}-log-concave; Lipschitz bound needs p <= {model.p_index:g}")
    grid = grid or Grid()
    u = grid.points()
    q = np.asarray(model.quantile(u))
    i, j = _pairs(u)
    ratio = np.abs(q[j] - q[i]) / theta_distance(p, u[i], u[j])
    k = int(np.argmax(ratio))
    return ModulusEstimate(float(ratio[k]), grid, ModulusKind.LIPSCHITZ,
                           argmax=(float(u[i[k]]), float(u[j[k]])))


def continuity_table(model: DistributionModel, deltas, grid: Grid | None = None) -> ModulusEstimate:
    """For each ``delta``, the largest ``T`` keeping theta_1-close pairs ``delta``-close.

    On a finite grid the admissible radii ``log T`` form an interval
    ``(0, r)`` with ``r`` the smallest theta_1 distance among pairs whose
    quantiles differ by more than ``delta``.  The table reports
    ``T = exp(r)`` (``inf`` when no pair exceeds ``delta``): every pair with
    ``theta_1(x, y) < log T`` satisfies ``|F^-1(x) - F^-1(y)| <= delta``.

    ``constant`` is ``max(delta / log T)`` over the table.
    """
    if model.tail_class not in (TailClass.EXPONENTIAL_TAIL, TailClass.SUPER_EXPONENTIAL):
        raise PreconditionError(f"{model!r} does not have at least exponential tails")
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(deltas <= 0):
        raise DomainError("deltas must be positive")
    grid = grid or Grid()
    u = grid.points()
    q = np.asarray(model.quantile(u))
    i, j = _pairs(u)
    dist = theta_distance(1.0, u[i], u[j])
    gap = np.abs(q[j] - q[i])
    order = np.argsort(gap)
    gap_sorted = gap[order]
    # suffix minima of theta distance over pairs sorted by quantile gap
    suffix_min = np.minimum.accumulate(dist[order][::-1])[::-1]
    rows = []
    for delta in deltas:
        start = np.searchsorted(gap_sorted, delta, side="right")
        radius = suffix_min[start] if start < gap_sorted.size else math.inf
        rows.append((float(delta), float(math.exp(radius)) if math.isfinite(radius) else math.inf))
    slopes = [d / math.log(t) for d, t in rows if math.isfinite(t)]
    const = max(slopes) if slopes else 0.0
    return ModulusEstimate(const, grid, ModulusKind.UNIFORM_CONTINUITY_TABLE, table=tuple(rows))


def _require_log_concave(model):
    if model.p_index < 1.0:
        raise PreconditionError(f"{model!r} is not log-concave")


def check_quantile_gap_bound(model: DistributionModel, grid: Grid | None = None,
                             tail_mass: float | None = None) -> BoundCheck:
    """Calibrate ``c`` in the log-concave quantile gap inequality.

    For ``x < y``::

        |F^-1(y) - F^-1(x)| <= c * max(|F^-1(y)| log(y/x) / log(1/y),
                                       |F^-1(x)| log((1-x)/(1-y)) / log(1/(1-x)))

    Pairs where the bracket vanishes are skipped.  With ``tail_mass`` set,
    only pairs lying together in ``(0, tail_mass]`` or in
    ``[1 - tail_mass, 1)`` are used.
    """
    _require_log_concave(model)
    grid = grid or Grid()
    u = grid.points()
    q = np.asarray(model.quantile(u))
    i, j = _pairs(u)
    if tail_mass is not None:
        both_left = u[j] <= tail_mass
        both_right = u[i] >= 1.0 - tail_mass
        keep = both_left | both_right
        i, j = i[keep], j[keep]
    x, y = u[i], u[j]
    lhs = np.abs(q[j] - q[i])
    first = np.abs(q[j]) * np.log1p((y - x) / x) / (-np.log(y))
    second = np.abs(q[i]) * np.log1p((y - x) / (1.0 - y)) / (-np.log1p(-x))
    return _sup(lhs, np.maximum(first, second), x, y, grid)


def check_quantile_tail_bound(model: DistributionModel, p: float | None = None,
                              grid: Grid | None = None) -> BoundCheck:
    """Calibrate ``c`` in ``|F^-1(x)| <= c * max(log(1/x), log(1/(1-x))) ** (1/p)``.

    ``p`` defaults to the model's own log-concavity index.  The returned
    ``argmax`` is ``(x, x)``.
    """
    _require_log_concave(model)
    p = model.p_index if p is None else float(p)
    if p < 1.0 or p > model.p_index:
        raise PreconditionError(f"tail bound needs 1 <= p <= {model.p_index:g}, got {p:g}")
    grid = grid or Grid()
    u = grid.points()
    q = np.abs(np.asarray(model.quantile(u)))
    scale = np.maximum(-np.log(u), -np.log1p(-u)) ** (1.0 / p)
    return _sup(q, scale, u, u, grid)


def check_central_lipschitz(model: DistributionModel, epsilon: float,
                            grid: Grid | None = None) -> BoundCheck:
    """Calibrate ``c`` in ``|F^-1(x) - F^-1(y)| <= (c / epsilon) |x - y|`` on ``[eps, 1-eps]``.

    The default grid places 64 geometric points in each half, clustering at
    the endpoints where the quantile function is steepest.
    """
    _require_log_concave(model)
    if not 0.0 < epsilon < 0.5:
        raise DomainError("epsilon must lie in (0, 1/2)")
    grid = grid or Grid(floor=epsilon, tail_points=64, central_points=0, tail_edge=0.5)
    u = grid.points()
    if u[0] < epsilon or u[-1] > 1.0 - epsilon:
        raise DomainError("central Lipschitz grid must lie inside [epsilon, 1 - epsilon]")
    q = np.asarray(model.quantile(u))
    i, j = _pairs(u)
    return _sup(np.abs(q[j] - q[i]), (u[j] - u[i]) / epsilon, u[i], u[j], grid)
