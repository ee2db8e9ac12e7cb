"""
Probability Metrics
The lambda_r distance sup |f_U(t) - f_V(t)| / |t|^r (r > 2) on log-spaced grids,
and the forward / backward CLT-rate bounds it satisfies for normalized sums
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from analysis.moments import moments
from core.cf_core import GaussianCF, check_positive_int, default_t_grid, root_rescale, sum_rescale
from core.errors import ConfigError

logger = logging.getLogger(__name__)

TAYLOR_BOUND = "taylor-bound"
EXCLUDE = "exclude"
SMALL_T_POLICIES = (TAYLOR_BOUND, EXCLUDE)

# |f_U - f_V| at or below this is treated as agreement
DIFFERENCE_FLOOR = 1e-15
MAX_LOWER_EXTENSIONS = 3
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class LambdaConfig:
    r: float = 3.0
    t_min: float = 1e-3
    t_max: float = 50.0
    grid_size: int = 4096
    small_t_policy: str = TAYLOR_BOUND

    def __post_init__(self):
        if not (isinstance(self.r, (int, float)) and math.isfinite(self.r) and self.r > 2):
            raise ConfigError(f"r must be > 2, got {self.r!r}")
        if not (self.t_min > 0 and math.isfinite(self.t_max) and self.t_min < self.t_max):
            raise ConfigError(f"need 0 < t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if isinstance(self.grid_size, bool) or not isinstance(self.grid_size, int) or self.grid_size < 2:
            raise ConfigError(f"grid_size must be an integer >= 2, got {self.grid_size!r}")
        if self.small_t_policy not in SMALL_T_POLICIES:
            raise ConfigError(f"small_t_policy must be one of {SMALL_T_POLICIES}")

    def to_dict(self):
        return {
            "r": self.r,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "grid_size": self.grid_size,
            "small_t_policy": self.small_t_policy,
        }


@dataclass(frozen=True)
class MetricReport:
    """A distance value with the grid or quadrature parameters behind it"""
    metric: str
    value: float
    parameters: dict = field(default_factory=dict)

    def to_dict(self):
        return {"metric": self.metric, "value": self.value, "parameters": dict(self.parameters)}


def _ratios(cf_u, cf_v, grid, r):
    diff = np.abs(cf_u._value(grid) - cf_v._value(grid))
    diff[diff <= DIFFERENCE_FLOOR] = 0.0
    return diff / np.power(np.abs(grid), r)


def _decade(t_from, t_to, per_decade):
    points = max(int(math.ceil(per_decade * abs(math.log10(t_to / t_from)))) + 1, 3)
    positive = np.geomspace(t_from, t_to, points)
    return np.concatenate([-positive[::-1], positive])


def lambda_r(cf_u, cf_v, config=None):
    """
    Grid sup of |f_U(t) - f_V(t)| / |t|^r over t in +/-[t_min, t_max].

    Under the taylor-bound policy a sup sitting at t_min pushes the grid down
    one decade at a time (at most three times); a ratio still peaking at the
    lower edge after that, or growing again past a one-decade extension of
    t_max, means lambda_r is infinite.
    """
    config = config or LambdaConfig()
    r = config.r
    grid = default_t_grid(config.t_max, config.grid_size, config.t_min)
    ratios = _ratios(cf_u, cf_v, grid, r)
    best = float(np.max(ratios))
    argmax = float(abs(grid[int(np.argmax(ratios))]))
    per_decade = (config.grid_size - 1) / math.log10(config.t_max / config.t_min)
    mid = grid.size // 2
    t_min, t_max = config.t_min, config.t_max
    extensions = 0
    diverged = False

    if config.small_t_policy == TAYLOR_BOUND and best > 0:
        edge = max(ratios[mid - 1], ratios[mid])
        while edge >= best and extensions < MAX_LOWER_EXTENSIONS:
            lower = _decade(t_min / 10.0, t_min, per_decade)
            lower_ratios = _ratios(cf_u, cf_v, lower, r)
            t_min /= 10.0
            extensions += 1
            if lower_ratios.max() > best:
                best = float(lower_ratios.max())
                argmax = float(abs(lower[int(np.argmax(lower_ratios))]))
            edge = max(lower_ratios[lower.size // 2 - 1], lower_ratios[lower.size // 2])
            logger.debug("lambda_r lower extension %d: t_min=%g sup=%g", extensions, t_min, best)
        if best > 0 and edge >= best:
            diverged = True

        if not diverged and max(ratios[0], ratios[-1]) >= best > 0:
            upper = _decade(t_max, t_max * 10.0, per_decade)
            upper_ratios = _ratios(cf_u, cf_v, upper, r)
            t_max *= 10.0
            if upper_ratios.max() > best:
                best = float(upper_ratios.max())
                argmax = float(abs(upper[int(np.argmax(upper_ratios))]))
                diverged = max(upper_ratios[0], upper_ratios[-1]) >= best

    value = math.inf if diverged else best
    if diverged:
        logger.info("lambda_%g diverges: ratio keeps growing at the grid edge", r)
    parameters = dict(config.to_dict())
    parameters.update({
        "effective_t_min": t_min,
        "effective_t_max": t_max,
        "extensions": extensions,
        "argmax_t": argmax,
        "diverged": diverged,
    })
    return MetricReport(metric="lambda_r", value=value, parameters=parameters)


@dataclass(frozen=True)
class BoundCheck:
    """One side of the CLT-rate inequality with both numbers reported"""
    direction: str
    lhs: float
    rhs: float
    holds: bool
    applicable: bool
    m: int
    r: float
    base_distance: float
    variance: float

    def to_dict(self):
        return {
            "direction": self.direction,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "applicable": self.applicable,
            "m": self.m,
            "r": self.r,
            "base_distance": self.base_distance,
            "variance": self.variance,
        }


def _with_r(config, r):
    config = config or LambdaConfig()
    return config if r is None else replace(config, r=float(r))


def matched_gaussian(cf):
    """Gaussian with the same (closed-form) variance as cf"""
    return GaussianCF(moments(cf).mu2)


def clt_bound_check(cf_xi, m, r=3.0, config=None):
    """lambda_r(S_m, Z) <= m^{-(r/2 - 1)} lambda_r(xi, Z), Z matching the variance of xi"""
    m = check_positive_int(m)
    config = _with_r(config, r)
    gaussian = matched_gaussian(cf_xi)
    base = lambda_r(cf_xi, gaussian, config).value
    lhs = lambda_r(sum_rescale(cf_xi, m), gaussian, config).value
    rhs = m ** -(config.r / 2.0 - 1.0) * base
    applicable = math.isfinite(base)
    if not applicable:
        logger.info("lambda_r(xi, Z) is infinite; forward bound not applicable")
    return BoundCheck(
        direction="forward",
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs * (1.0 + BOUND_SLACK),
        applicable=applicable,
        m=m,
        r=config.r,
        base_distance=base,
        variance=gaussian.variance,
    )


def backward_bound(cf_root, m, r=3.0, config=None):
    """lambda_r(X(m), Z) >= m^{r/2 - 1} lambda_r(X(1), Z) with X(m) = root_rescale(X(1), m)"""
    m = check_positive_int(m)
    config = _with_r(config, r)
    gaussian = matched_gaussian(cf_root)
    base = lambda_r(cf_root, gaussian, config).value
    lhs = lambda_r(root_rescale(cf_root, m), gaussian, config).value
    lower = m ** (config.r / 2.0 - 1.0) * base
    applicable = math.isfinite(base)
    return BoundCheck(
        direction="backward",
        lhs=lhs,
        rhs=lower,
        holds=lhs * (1.0 + BOUND_SLACK) >= lower,
        applicable=applicable,
        m=m,
        r=config.r,
        base_distance=base,
        variance=gaussian.variance,
    )
