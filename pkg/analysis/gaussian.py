"""
Gaussian Component Detection
Estimates the Gaussian coefficient a = lim -log f(t) / t^2, decides whether a
symmetric ID law has a Gaussian component, and measures how fast f_m
approaches the limit exp(-a t^2)
"""
import logging
from dataclasses import dataclass

import numpy as np

from core.cf_core import (DEFAULT_GRID_SIZE, _check_param, check_positive_int,
                          default_t_grid, limit_gaussian, root_rescale)
from core.errors import InputError, NoFiniteMomentError
from core.limits import DEFAULT_SCHEDULE, sup_deviation, tail_estimate

logger = logging.getLogger(__name__)

DEFAULT_T_SCHEDULE = DEFAULT_SCHEDULE
DEFAULT_TOL = 1e-4


@dataclass(frozen=True)
class GaussianEstimate:
    a_hat: float
    component_variance: float
    error_bound: float
    t_used: float
    monotone: bool
    schedule: tuple
    values: tuple


@dataclass(frozen=True)
class GaussianDecision:
    has_component: bool
    estimate: GaussianEstimate

    @property
    def a_hat(self):
        return self.estimate.a_hat


def estimate_gaussian_coefficient(cf, t_schedule=DEFAULT_T_SCHEDULE):
    """
    a_hat = -log f(t) / t^2 at the largest schedule point.

    The error bound is the gap to the second-largest point. Positivity
    failures (empirical CFs) propagate as PositivityError naming t.
    """
    tail = tail_estimate(cf._log, t_schedule, power=2)
    logger.debug("gaussian coefficient sequence %s", tail.values)
    return GaussianEstimate(
        a_hat=tail.value,
        component_variance=2.0 * tail.value,
        error_bound=tail.error_bound,
        t_used=tail.x_used,
        monotone=tail.monotone,
        schedule=tail.schedule,
        values=tail.values,
    )


def has_gaussian_component(cf, tol=DEFAULT_TOL, t_schedule=DEFAULT_T_SCHEDULE):
    """yes iff a_hat > tol + error_bound; anything within tolerance of 0 is no"""
    tol = _check_param(tol, "tol")
    estimate = estimate_gaussian_coefficient(cf, t_schedule)
    decision = estimate.a_hat > tol + estimate.error_bound
    return GaussianDecision(has_component=decision, estimate=estimate)


def limit_deviation(cf, m, T, grid_size=DEFAULT_GRID_SIZE, a_hat=None,
                    tol=DEFAULT_TOL, t_schedule=DEFAULT_T_SCHEDULE):
    """
    sup over |t| <= T of |f_m(t) - exp(-a_hat t^2)|.

    When a_hat is not supplied it is taken from the detector: the estimate
    if a component is found, 0 (degenerate limit) otherwise.
    """
    m = check_positive_int(m)
    T = _check_param(T, "T")
    if a_hat is None:
        decision = has_gaussian_component(cf, tol, t_schedule)
        a_hat = decision.a_hat if decision.has_component else 0.0
    limit = limit_gaussian(a_hat)
    grid = default_t_grid(T, grid_size, min(1e-3, T * 1e-3))
    values = np.exp(root_rescale(cf, m)._log(grid))
    return sup_deviation(values, limit._value(grid), grid, a_hat)


def remainder_profile(cf, a_hat, t_grid):
    """(t, r(t)) with r(t) = (-log f(t) - a_hat t^2) / t^2"""
    a_hat = _check_param(a_hat, "a_hat", inclusive=True)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or not np.all(np.isfinite(t)):
        raise InputError("t_grid must be a one-dimensional array of finite values")
    if np.any(t == 0):
        raise InputError("remainder profile is undefined at t = 0")
    t2 = np.square(t)
    r = (-cf.log_evaluate(t) - a_hat * t2) / t2
    return list(zip(t.tolist(), r.tolist()))


def is_gaussian_by_variance(cf, rel_tol=1e-9, t_schedule=DEFAULT_T_SCHEDULE):
    """
    Variance of f equals the limit variance 2 a_hat only for Gaussian f.
    Laws without a finite variance are never Gaussian.
    """
    try:
        mu2 = cf.cumulants()[0]
    except NoFiniteMomentError:
        return False
    a_hat = estimate_gaussian_coefficient(cf, t_schedule).a_hat
    return abs(mu2 - 2.0 * a_hat) <= rel_tol * max(1.0, mu2)
