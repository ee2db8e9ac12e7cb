"""
Moment Machinery
Second and fourth moments of symmetric laws from closed-form cumulants or
central finite differences at t = 0, and the kurtosis scaling kappa(m) = m kappa(1)
"""
import logging
from dataclasses import dataclass

import numpy as np

from analysis.gaussian import DEFAULT_T_SCHEDULE, DEFAULT_TOL, has_gaussian_component
from core.cf_core import check_positive_int, root_rescale
from core.errors import InputError, NumericError

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed-form"
FINITE_DIFFERENCE = "finite-difference"
METHODS = (CLOSED_FORM, FINITE_DIFFERENCE)

# Below this |m kappa_1| the kurtosis check switches to absolute error
GAUSSIAN_KAPPA_THRESHOLD = 1e-9

_ROUGH_STEP = 1e-3
# 4th-order-accurate central stencils on t = -3h..3h
_D2_STENCIL = np.array([0.0, -1.0, 16.0, -30.0, 16.0, -1.0, 0.0]) / 12.0
_D4_STENCIL = np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0


@dataclass(frozen=True)
class MomentSet:
    mu2: float
    mu4: float
    kappa: float
    method: str

    def to_dict(self):
        return {"mu2": self.mu2, "mu4": self.mu4, "kappa": self.kappa, "method": self.method}


def _closed_form(cf):
    k2, k4 = cf.cumulants()
    kappa = k4 / (k2 * k2) if k2 > 0 else 0.0
    return MomentSet(mu2=k2, mu4=k4 + 3.0 * k2 * k2, kappa=kappa, method=CLOSED_FORM)


def finite_difference_step(cf):
    """h = max(1e-2 s, 1e-4) with s = 1 / sqrt(mu2) from a coarse second difference"""
    f_delta = float(cf._value(np.array([_ROUGH_STEP]))[0])
    mu2_rough = 2.0 * (1.0 - f_delta) / _ROUGH_STEP ** 2
    if not mu2_rough > 0:
        raise NumericError(f"cannot size a difference step: rough second moment {mu2_rough!r}")
    return max(1e-2 / np.sqrt(mu2_rough), 1e-4)


def _finite_difference(cf):
    # Heavy tails have no derivatives at 0 to difference
    cf.cumulants()
    h = finite_difference_step(cf)
    values = cf._value(h * np.arange(-3.0, 4.0))
    mu2 = -float(np.dot(_D2_STENCIL, values)) / h ** 2
    mu4 = float(np.dot(_D4_STENCIL, values)) / h ** 4
    logger.debug("finite-difference moments h=%g mu2=%r mu4=%r", h, mu2, mu4)
    kappa = mu4 / (mu2 * mu2) - 3.0 if mu2 > 0 else 0.0
    return MomentSet(mu2=mu2, mu4=mu4, kappa=kappa, method=FINITE_DIFFERENCE)


def moments(cf, method=CLOSED_FORM):
    """mu2 = -f''(0), mu4 = f''''(0) and excess kurtosis mu4 / mu2^2 - 3"""
    if method == CLOSED_FORM:
        return _closed_form(cf)
    if method == FINITE_DIFFERENCE:
        return _finite_difference(cf)
    raise InputError(f"unknown moment method {method!r}; choose from {METHODS}")


@dataclass(frozen=True)
class KurtosisCheck:
    m: int
    method: str
    kappa_1: float
    kappa_m: float
    m_times_kappa_1: float
    relative_error: float
    moments_1: MomentSet
    moments_m: MomentSet

    @property
    def absolute(self):
        """True when the Gaussian special case reports absolute error"""
        return abs(self.m_times_kappa_1) <= GAUSSIAN_KAPPA_THRESHOLD


def kurtosis_scaling_check(cf, m, method=CLOSED_FORM):
    m = check_positive_int(m)
    base = moments(cf, method)
    rescaled = moments(root_rescale(cf, m), method)
    target = m * base.kappa
    gap = abs(rescaled.kappa - target)
    error = gap if abs(target) <= GAUSSIAN_KAPPA_THRESHOLD else gap / abs(target)
    return KurtosisCheck(
        m=m,
        method=method,
        kappa_1=base.kappa,
        kappa_m=rescaled.kappa,
        m_times_kappa_1=target,
        relative_error=error,
        moments_1=base,
        moments_m=rescaled,
    )


@dataclass(frozen=True)
class CumulantCheck:
    lhs: float
    rhs: float
    relative_error: float


def cumulant_scaling_check(cf, m, method=CLOSED_FORM):
    """mu4(m) - 3 mu2(m)^2 against m (mu4(1) - 3 mu2(1)^2)"""
    m = check_positive_int(m)
    base = moments(cf, method)
    rescaled = moments(root_rescale(cf, m), method)
    lhs = rescaled.mu4 - 3.0 * rescaled.mu2 ** 2
    rhs = m * (base.mu4 - 3.0 * base.mu2 ** 2)
    scale = max(abs(rhs), 1.0)
    return CumulantCheck(lhs=lhs, rhs=rhs, relative_error=abs(lhs - rhs) / scale)


def variance_gap(cf, tol=DEFAULT_TOL, t_schedule=DEFAULT_T_SCHEDULE):
    """mu2 - 2 a: the variance the Gaussian limit loses (a = 0 without a component)"""
    mu2 = moments(cf).mu2
    decision = has_gaussian_component(cf, tol, t_schedule)
    a = decision.a_hat if decision.has_component else 0.0
    return mu2 - 2.0 * a
