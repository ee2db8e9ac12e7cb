"""
Laplace Transforms of Positive ID Laws
Subordinator families, the canonical form
L(s) = exp{-sigma s - int (1 - e^{-as}) / (1 - e^{-a}) dmu(a)},
the rescaling L_m(s) = L(m s)^(1/m), drift extraction and the degeneracy test
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.cf_core import _check_param, check_positive_int
from core.errors import InputError
from core.limits import DEFAULT_SCHEDULE, sup_deviation, tail_estimate
from core.spectral import SpectralMeasure

logger = logging.getLogger(__name__)

DEFAULT_S_MIN = 1e-3
DEFAULT_S_MAX = 1e3
DEFAULT_S_GRID_SIZE = 1024
DEFAULT_S_SCHEDULE = DEFAULT_SCHEDULE


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"s must be finite, got {s!r}")
    if np.any(arr <= 0):
        raise InputError(f"s must be > 0, got {s!r}")
    return arr


class LaplaceTransform:
    """Completely monotone transform E exp(-sW) of a nonnegative ID law"""
    kind = "abstract"
    # exact drift when the transform carries it in closed form, else None
    drift = None

    def _log(self, s):
        raise NotImplementedError

    def evaluate(self, s):
        arr = _check_s(s)
        out = np.exp(self._log(arr))
        return float(out) if np.ndim(s) == 0 else out

    def log_evaluate(self, s):
        arr = _check_s(s)
        out = self._log(arr)
        return float(out) if np.ndim(s) == 0 else out

    def __call__(self, s):
        return self.evaluate(s)

    def describe(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class GammaSub(LaplaceTransform):
    """L(s) = (1 + s)^(-shape)"""
    shape: float
    kind = "gamma"
    drift = 0.0

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_param(self.shape, "shape"))

    def _log(self, s):
        return -self.shape * np.log1p(s)

    def describe(self):
        return {"kind": self.kind, "shape": self.shape}


@dataclass(frozen=True)
class PoissonSub(LaplaceTransform):
    """L(s) = exp(rate (e^{-s} - 1)): Poisson count of unit jumps"""
    rate: float
    kind = "poisson"
    drift = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_param(self.rate, "rate"))

    def _log(self, s):
        return self.rate * np.expm1(-s)

    def to_canonical(self):
        """Single atom at a = 1 carrying rate (1 - e^{-1})"""
        mass = -self.rate * math.expm1(-1.0)
        return CanonicalLT(0.0, SpectralMeasure.from_atoms([(1.0, mass)]))

    def describe(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class StableSub(LaplaceTransform):
    """L(s) = exp(-(c s)^alpha), alpha in (0, 1)"""
    alpha: float
    scale: float = 1.0
    kind = "stable"
    drift = 0.0

    def __post_init__(self):
        alpha = _check_param(self.alpha, "alpha")
        if alpha >= 1.0:
            raise InputError(f"alpha must be in (0, 1), got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "scale", _check_param(self.scale, "scale"))

    def _log(self, s):
        return -np.power(self.scale * s, self.alpha)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha, "scale": self.scale}


@dataclass(frozen=True)
class Drift(LaplaceTransform):
    """L(s) = e^{-sigma s}: point mass at sigma"""
    sigma: float
    kind = "drift"

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_param(self.sigma, "sigma", inclusive=True))

    def _log(self, s):
        return -self.sigma * s

    @property
    def drift(self):
        return self.sigma

    def to_canonical(self):
        return CanonicalLT(self.sigma)

    def describe(self):
        return {"kind": self.kind, "sigma": self.sigma}


def _subordinator_kernel(s, a):
    return np.expm1(-a * s) / np.expm1(-a)


@dataclass(frozen=True, eq=False)
class CanonicalLT(LaplaceTransform):
    drift: float
    measure: SpectralMeasure = None
    kind = "canonical"

    def __post_init__(self):
        object.__setattr__(self, "drift", _check_param(self.drift, "drift", inclusive=True))
        if self.measure is None:
            object.__setattr__(self, "measure", SpectralMeasure())

    def _log(self, s):
        return -self.drift * s - self.measure.integrate(_subordinator_kernel, s)

    def describe(self):
        return {"kind": self.kind, "drift": self.drift, "measure": self.measure.to_dict()}


@dataclass(frozen=True, eq=False)
class ProductLT(LaplaceTransform):
    factors: tuple
    kind = "product"

    @property
    def drift(self):
        drifts = [f.drift for f in self.factors]
        return None if None in drifts else float(sum(drifts))

    def _log(self, s):
        return sum(f._log(s) for f in self.factors)

    def describe(self):
        return {"kind": self.kind, "factors": [f.describe() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class RootRescaledLT(LaplaceTransform):
    """L_m(s) = L(m s)^(1/m)"""
    base: LaplaceTransform
    m: int
    kind = "root-rescale"

    @property
    def drift(self):
        return self.base.drift

    def _log(self, s):
        return self.base._log(self.m * s) / self.m

    def describe(self):
        return {"kind": self.kind, "m": self.m, "base": self.base.describe()}


def evaluate_L(lt, s):
    return lt.evaluate(s)


def root_rescale_L(lt, m):
    return RootRescaledLT(lt, check_positive_int(m))


def multiply(lt1, lt2):
    """Product transform (sum of independent positive variables)"""
    factors = []
    for lt in (lt1, lt2):
        factors.extend(lt.factors if isinstance(lt, ProductLT) else (lt,))
    return ProductLT(tuple(factors))


def default_s_grid(s_max=DEFAULT_S_MAX, size=DEFAULT_S_GRID_SIZE, s_min=DEFAULT_S_MIN):
    s_min = _check_param(s_min, "s_min")
    s_max = _check_param(s_max, "s_max")
    if s_min >= s_max:
        raise InputError(f"s_min ({s_min}) must be below s_max ({s_max})")
    size = check_positive_int(size, "grid size")
    if size < 3:
        raise InputError("s-grid needs at least 3 points")
    return np.geomspace(s_min, s_max, size)


@dataclass(frozen=True)
class DriftEstimate:
    sigma_hat: float
    error_bound: float
    s_used: float
    monotone: bool
    schedule: tuple
    values: tuple


@dataclass(frozen=True)
class SupportDecision:
    touches_zero: bool
    estimate: DriftEstimate

    @property
    def sigma_hat(self):
        return self.estimate.sigma_hat


def estimate_drift(lt, s_schedule=DEFAULT_S_SCHEDULE):
    """sigma_hat = -log L(s) / s at the last schedule point"""
    tail = tail_estimate(lt.log_evaluate, s_schedule, power=1)
    return DriftEstimate(
        sigma_hat=tail.value,
        error_bound=tail.error_bound,
        s_used=tail.x_used,
        monotone=tail.monotone,
        schedule=tail.schedule,
        values=tail.values,
    )


def support_touches_zero(lt, tol=1e-4, s_schedule=DEFAULT_S_SCHEDULE):
    """
    Zero drift (degenerate limit D = 1) means P{W < x} > 0 for every x > 0.
    Otherwise the support starts at sigma_hat.
    """
    tol = _check_param(tol, "tol")
    estimate = estimate_drift(lt, s_schedule)
    touches = estimate.sigma_hat <= tol + estimate.error_bound
    return SupportDecision(touches_zero=touches, estimate=estimate)


def limit_deviation_L(lt, m, S, grid_size=DEFAULT_S_GRID_SIZE, sigma_hat=None,
                      tol=1e-4, s_schedule=DEFAULT_S_SCHEDULE):
    """
    sup over s in (0, S] of |L_m(s) - exp(-sigma_hat s)|.

    Without an explicit sigma_hat the reference uses the exact drift of lt.
    Transforms without a closed-form drift fall back to support_touches_zero:
    zero when the support reaches 0, the estimate otherwise.
    """
    m = check_positive_int(m)
    S = _check_param(S, "S")
    if sigma_hat is None and lt.drift is not None:
        sigma_hat = lt.drift
    elif sigma_hat is None:
        logger.debug("no closed-form drift for %s; estimating it", lt.kind)
        decision = support_touches_zero(lt, tol, s_schedule)
        sigma_hat = 0.0 if decision.touches_zero else decision.sigma_hat
    sigma_hat = _check_param(sigma_hat, "sigma_hat", inclusive=True)
    grid = default_s_grid(S, grid_size, min(DEFAULT_S_MIN, S * 1e-3))
    rescaled = root_rescale_L(lt, m)
    values = np.exp(rescaled._log(grid))
    reference = np.exp(-sigma_hat * grid)
    return sup_deviation(values, reference, grid, sigma_hat)


@dataclass(frozen=True)
class ShapeCheck:
    """Grid-resolution necessary conditions for complete monotonicity"""
    positive: bool
    nonincreasing: bool
    convex: bool
    grid_size: int

    @property
    def passed(self):
        return self.positive and self.nonincreasing and self.convex


def shape_check(lt, s_grid=None):
    grid = default_s_grid() if s_grid is None else _check_s(s_grid)
    logs = lt._log(grid)
    values = np.exp(logs)
    positive = bool(np.all(np.isfinite(logs)) and np.all(values > 0.0) and np.all(values <= 1.0))
    steps = np.diff(values)
    nonincreasing = bool(np.all(steps <= 4 * np.finfo(float).eps))
    slopes = steps / np.diff(grid)
    slack = 1e-8 * max(float(np.max(np.abs(slopes))), np.finfo(float).tiny)
    convex = bool(np.all(np.diff(slopes) >= -slack))
    return ShapeCheck(positive, nonincreasing, convex, int(grid.size))


_SUBORDINATORS = {
    "gamma": (GammaSub, ("shape",)),
    "poisson": (PoissonSub, ("rate",)),
    "stable": (StableSub, ("alpha", "scale")),
    "drift": (Drift, ("sigma",)),
}


def family_from_name(name, **params):
    if name not in _SUBORDINATORS:
        raise InputError(f"unknown subordinator {name!r}; choose from {sorted(_SUBORDINATORS)}")
    cls, fields = _SUBORDINATORS[name]
    unknown = set(params) - set(fields)
    if unknown:
        raise InputError(f"subordinator {name!r} does not take {sorted(unknown)}")
    return cls(**params)


def family_fields(name):
    if name not in _SUBORDINATORS:
        raise InputError(f"unknown subordinator {name!r}; choose from {sorted(_SUBORDINATORS)}")
    return _SUBORDINATORS[name][1]
