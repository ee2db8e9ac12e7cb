"""
CF Inversion and Stable Approximation
Distribution functions from symmetric characteristic functions,
F(x) = 1/2 + (1/pi) int_0^T f(t) sin(tx) / t dt, Kolmogorov distances, grid
fits of symmetric stable laws and the stable-vs-Gaussian comparison for
normalized sums
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from analysis.metrics import MetricReport
from analysis.moments import moments
from core.cf_core import GaussianCF, SymmetricStableCF, check_positive_int, sum_rescale
from core.errors import ConfigError, InputError, NoFiniteMomentError, QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_X_POINTS = 401
X_HALF_WIDTH_UNITS = 8.0
PROBABILITY_SLACK = 1e-9
TIE_TOLERANCE = 1e-4
# (h * omega)^4 |f| per interval stays below PHASE_BUDGET^4
PHASE_BUDGET = 0.05
MAX_NODES = 1 << 20
_CHUNK = 4_000_000

DEFAULT_ALPHA_GRID = tuple(np.round(np.arange(1.0, 1.951, 0.05), 2).tolist())
DEFAULT_SCALE_FACTORS = tuple(np.geomspace(0.25, 2.0, 21).tolist())

STABLE_CLOSER = "stable closer"
GAUSSIAN_CLOSER = "gaussian closer"
TIE = "tie within tolerance"


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation T (None = automatic), node count N and tail tolerance"""
    truncation: float = None
    nodes: int = 4096
    eps_tail: float = 1e-12
    t_cap: float = 1e5

    def __post_init__(self):
        if self.truncation is not None and not (math.isfinite(self.truncation) and self.truncation > 0):
            raise ConfigError(f"truncation must be > 0, got {self.truncation!r}")
        if isinstance(self.nodes, bool) or not isinstance(self.nodes, int) or self.nodes < 64:
            raise ConfigError(f"node count must be an integer >= 64, got {self.nodes!r}")
        if not 0 < self.eps_tail < 1:
            raise ConfigError(f"eps_tail must be in (0, 1), got {self.eps_tail!r}")

    def to_dict(self):
        return {
            "truncation": self.truncation,
            "nodes": self.nodes,
            "eps_tail": self.eps_tail,
            "t_cap": self.t_cap,
        }


def _abs_f(cf, t):
    return abs(float(cf._value(np.array([t]))[0]))


def auto_truncation(cf, quad):
    """Smallest T (to bisection precision) with |f(T)| < eps_tail"""
    if not cf.positive:
        raise QuadratureError("empirical CFs do not decay; pass an explicit truncation")
    eps = quad.eps_tail
    hi = 1.0
    if _abs_f(cf, hi) < eps:
        while hi > 1e-8 and _abs_f(cf, hi / 2.0) < eps:
            hi /= 2.0
        lo = hi / 2.0
    else:
        while _abs_f(cf, hi) >= eps:
            hi *= 2.0
            if hi > quad.t_cap:
                raise QuadratureError(
                    f"characteristic function does not decay below {eps:g} by T={quad.t_cap:g}")
        lo = hi / 2.0
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _abs_f(cf, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def _build_nodes(T, n):
    split = min(1.0, T)
    n_lin = max(n // 4, 2)
    linear = np.linspace(0.0, split, n_lin + 1)
    if T <= split:
        return np.linspace(0.0, T, n + 1)
    logarithmic = np.geomspace(split, T, max(n - n_lin, 2) + 1)[1:]
    return np.concatenate([linear, logarithmic])


def resolve_nodes(cf, quad, x_max):
    """
    Quadrature nodes on [0, T]: linear on (0, 1], log-spaced on [1, T].

    N doubles until every interval keeps (h * x_max)^4 |f| under the phase
    budget, so oscillation of sin(tx) is resolved where f carries weight.
    """
    T = quad.truncation if quad.truncation is not None else auto_truncation(cf, quad)
    n = quad.nodes
    while True:
        nodes = _build_nodes(T, n)
        weight = np.abs(cf._value(nodes))
        weight = np.maximum(weight[:-1], weight[1:])
        phase = np.diff(nodes) * max(x_max, 1e-300)
        if np.all(phase ** 4 * weight <= PHASE_BUDGET ** 4) or n >= MAX_NODES:
            break
        n *= 2
    if n > quad.nodes:
        logger.debug("refined inversion nodes to %d for x_max=%g, T=%g", n, x_max, T)
    return T, nodes


def _half_integrals(cf, xs, quad):
    """(1/pi) int_0^T f(t) sin(t x) / t dt for x >= 0"""
    x_max = float(np.max(xs)) if xs.size else 0.0
    T, nodes = resolve_nodes(cf, quad, x_max)
    f = cf._value(nodes)
    t = nodes[1:]
    out = np.empty_like(xs)
    step = max(1, _CHUNK // nodes.size)
    for start in range(0, xs.size, step):
        block = xs[start:start + step]
        integrand = np.empty((block.size, nodes.size))
        integrand[:, 0] = block * f[0]
        integrand[:, 1:] = f[1:] * np.sin(np.outer(block, t)) / t
        out[start:start + step] = simpson(integrand, x=nodes, axis=-1) / math.pi
    return out, T, nodes.size


def _cdf_array(cf, x, quad):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InputError("x must be finite")
    flat = np.ravel(x)
    magnitudes, inverse = np.unique(np.abs(flat), return_inverse=True)
    half, T, n_nodes = _half_integrals(cf, magnitudes, quad)
    signed = np.sign(flat) * half[inverse]
    cdf = 0.5 + signed
    low = cdf < -PROBABILITY_SLACK
    high = cdf > 1.0 + PROBABILITY_SLACK
    if np.any(low | high):
        i = int(np.flatnonzero(low | high)[0])
        raise QuadratureError(f"inverted CDF left [0, 1] at x={flat[i]!r}: {cdf[i]!r}")
    cdf = np.clip(cdf, 0.0, 1.0)
    return cdf.reshape(x.shape), T, n_nodes


def cdf_from_cf(cf, x, quad=None):
    """F(x) by sin-kernel inversion; F(0) = 1/2 exactly"""
    quad = quad or QuadratureSpec()
    values, _, _ = _cdf_array(cf, x, quad)
    return float(values) if np.ndim(x) == 0 else values


def _scale_unit(cf):
    """Standard deviation when finite, else 1/t with f(t) = 1/e"""
    try:
        k2 = cf.cumulants()[0]
        if k2 > 0:
            return math.sqrt(k2)
    except NoFiniteMomentError:
        pass
    lo, hi = 0.0, 1.0
    while cf._log(np.array([hi]))[0] > -1.0:
        lo, hi = hi, hi * 2.0
        if hi > 1e12:
            raise QuadratureError("cannot determine a scale: f stays above 1/e")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if cf._log(np.array([mid]))[0] > -1.0:
            lo = mid
        else:
            hi = mid
    return 1.0 / hi


def default_x_grid(*cfs, points=DEFAULT_X_POINTS):
    """Symmetric grid over 8 standard deviations (or 8 scale units) of the widest law"""
    half = X_HALF_WIDTH_UNITS * max(_scale_unit(cf) for cf in cfs)
    return np.linspace(-half, half, points)


def _as_x_grid(x_grid):
    grid = np.asarray(x_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise InputError("x_grid must be a nonempty one-dimensional array of finite values")
    return grid


def kolmogorov_distance(cf1, cf2, quad=None, x_grid=None):
    """max over x_grid of |F1(x) - F2(x)|"""
    quad = quad or QuadratureSpec()
    grid = default_x_grid(cf1, cf2) if x_grid is None else _as_x_grid(x_grid)
    f1, t1, n1 = _cdf_array(cf1, grid, quad)
    f2, t2, n2 = _cdf_array(cf2, grid, quad)
    gaps = np.abs(f1 - f2)
    i = int(np.argmax(gaps))
    return MetricReport(metric="kolmogorov", value=float(gaps[i]), parameters={
        "x_min": float(grid[0]),
        "x_max": float(grid[-1]),
        "x_points": int(grid.size),
        "argmax_x": float(grid[i]),
        "truncations": [t1, t2],
        "nodes": [n1, n2],
        "quadrature": quad.to_dict(),
    })


@dataclass(frozen=True)
class StableFit:
    alpha: float
    scale: float
    d_K: float
    cells: int


def _check_grid(values, name, low, high=None):
    grid = sorted(float(v) for v in values)
    if not grid:
        raise InputError(f"{name} must not be empty")
    for v in grid:
        if not math.isfinite(v) or v <= low or (high is not None and v > high):
            bound = f"({low}, {high}]" if high is not None else f"> {low}"
            raise InputError(f"{name} values must be {bound}, got {v!r}")
    return grid


def fit_stable(target, alpha_grid, scale_grid, quad=None, x_grid=None):
    """
    Exhaustive (alpha, c) search minimizing the Kolmogorov distance to target.
    Ties go to the smallest alpha, then the smallest c.
    """
    quad = quad or QuadratureSpec()
    alphas = _check_grid(alpha_grid, "alpha_grid", 0.0, 2.0)
    scales = _check_grid(scale_grid, "scale_grid", 0.0)
    grid = default_x_grid(target) if x_grid is None else _as_x_grid(x_grid)
    target_cdf, _, _ = _cdf_array(target, grid, quad)

    best = None
    for alpha in alphas:
        for scale in scales:
            candidate, _, _ = _cdf_array(SymmetricStableCF(alpha, scale), grid, quad)
            distance = float(np.max(np.abs(candidate - target_cdf)))
            if best is None or distance < best[2]:
                best = (alpha, scale, distance)
        logger.debug("stable fit alpha=%g best so far %s", alpha, best)
    return StableFit(alpha=best[0], scale=best[1], d_K=best[2], cells=len(alphas) * len(scales))


@dataclass(frozen=True)
class ComparisonReport:
    family: dict
    m: int
    d_K_gaussian: float
    best_alpha: float
    best_scale: float
    d_K_stable: float
    verdict: str
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "family": self.family,
            "m": self.m,
            "d_K_gaussian": self.d_K_gaussian,
            "best_alpha": self.best_alpha,
            "best_scale": self.best_scale,
            "d_K_stable": self.d_K_stable,
            "verdict": self.verdict,
            "metadata": self.metadata,
        }


def verdict_for(d_gaussian, d_stable, tie_tol=TIE_TOLERANCE):
    gap = d_gaussian - d_stable
    if abs(gap) <= tie_tol:
        return TIE
    return STABLE_CLOSER if gap > 0 else GAUSSIAN_CLOSER


def default_scale_grid(variance):
    """21 log-spaced scales around the stable scale of the matched Gaussian"""
    base = math.sqrt(variance / 2.0)
    return [base * factor for factor in DEFAULT_SCALE_FACTORS]


def approx_compare(family, m, alpha_grid=DEFAULT_ALPHA_GRID, scale_grid=None, quad=None,
                   tie_tol=TIE_TOLERANCE):
    """
    Distance of the normalized sum S_m to the variance-matched Gaussian
    against the best symmetric stable law with alpha < 2.
    """
    m = check_positive_int(m)
    quad = quad or QuadratureSpec()
    variance = moments(family).mu2
    if not variance > 0:
        raise InputError("approximation comparison needs a family with positive variance")
    summed = sum_rescale(family, m)
    gaussian = GaussianCF(variance)
    x_grid = default_x_grid(summed)

    d_gaussian = kolmogorov_distance(summed, gaussian, quad, x_grid).value
    alphas = [a for a in alpha_grid if a < 2.0]
    if not alphas:
        raise InputError("alpha_grid needs at least one value below 2")
    scales = default_scale_grid(variance) if scale_grid is None else list(scale_grid)
    fit = fit_stable(summed, alphas, scales, quad, x_grid)
    verdict = verdict_for(d_gaussian, fit.d_K, tie_tol)
    logger.info("approx-compare m=%d: gaussian %.3g, stable %.3g (alpha=%g, c=%g) -> %s",
                m, d_gaussian, fit.d_K, fit.alpha, fit.scale, verdict)
    return ComparisonReport(
        family=family.describe(),
        m=m,
        d_K_gaussian=d_gaussian,
        best_alpha=fit.alpha,
        best_scale=fit.scale,
        d_K_stable=fit.d_K,
        verdict=verdict,
        metadata={
            "variance": variance,
            "x_min": float(x_grid[0]),
            "x_max": float(x_grid[-1]),
            "x_points": int(x_grid.size),
            "alpha_grid": sorted(float(a) for a in alphas),
            "scale_grid": sorted(float(c) for c in scales),
            "cells": fit.cells,
            "tie_tolerance": tie_tol,
            "quadrature": quad.to_dict(),
        },
    )
