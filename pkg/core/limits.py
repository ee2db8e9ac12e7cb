"""
Limit Extraction
Schedule validation, last-point tail estimates with a successive-difference
error bound, and sup-deviation records shared by the CF and Laplace sides
"""
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import InputError, NumericError

logger = logging.getLogger(__name__)

# {10, 31.6, 100, 316, 1000, 3162, 1e4}
DEFAULT_SCHEDULE = tuple(np.geomspace(10.0, 1e4, 7).tolist())


def validate_schedule(schedule, name="schedule"):
    """At least 3 increasing positive points spanning two decades"""
    arr = np.asarray(schedule, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise InputError(f"{name} needs at least 3 points")
    if not np.all(np.isfinite(arr)) or arr[0] <= 0:
        raise InputError(f"{name} must contain finite positive values")
    if np.any(np.diff(arr) <= 0):
        raise InputError(f"{name} must be strictly increasing")
    if arr[-1] < 100.0 * arr[0]:
        raise InputError(f"{name} must span at least two decades, got [{arr[0]}, {arr[-1]}]")
    return arr


@dataclass(frozen=True)
class TailEstimate:
    """Value of -log F(x) / x^p at the last schedule point"""
    value: float
    error_bound: float
    x_used: float
    monotone: bool
    schedule: tuple
    values: tuple


def tail_estimate(log_fn, schedule, power):
    """
    Estimate lim -log F(x) / x^power from the schedule.

    log_fn must return log F on an array; non-finite logs mean F underflowed
    without an analytic exponent and are reported as a numeric error.
    """
    xs = validate_schedule(schedule)
    logs = np.asarray(log_fn(xs), dtype=float)
    if not np.all(np.isfinite(logs)):
        i = int(np.flatnonzero(~np.isfinite(logs))[0])
        raise NumericError(f"log transform is not finite at x={xs[i]!r}")
    values = -logs / np.power(xs, power)
    monotone = bool(np.all(np.diff(values) <= 0.0))
    if not monotone:
        logger.debug("tail sequence is not monotone: %s", values)
    return TailEstimate(
        value=max(float(values[-1]), 0.0),
        error_bound=abs(float(values[-1] - values[-2])),
        x_used=float(xs[-1]),
        monotone=monotone,
        schedule=tuple(xs.tolist()),
        values=tuple(values.tolist()),
    )


@dataclass(frozen=True, eq=False)
class Deviation:
    """Sup over a grid of |F_m - limit| with the curve that produced it"""
    value: float
    limit_coefficient: float
    argmax: float
    grid: np.ndarray
    deviations: np.ndarray


def sup_deviation(values, reference, grid, limit_coefficient):
    deviations = np.abs(np.asarray(values) - np.asarray(reference))
    i = int(np.argmax(deviations))
    return Deviation(
        value=float(deviations[i]),
        limit_coefficient=float(limit_coefficient),
        argmax=float(grid[i]),
        grid=grid,
        deviations=deviations,
    )
